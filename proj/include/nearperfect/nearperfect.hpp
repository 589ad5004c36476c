#pragma once

#include "nearperfect/arith.hpp"
#include "nearperfect/bignat.hpp"
#include "nearperfect/classify.hpp"
#include "nearperfect/construct.hpp"
#include "nearperfect/parallel.hpp"
#include "nearperfect/sieve.hpp"
#include "nearperfect/survey.hpp"
