// Command-line front end: classification, enumeration, theorem generators
// and conjecture surveys, with human tables or machine-readable JSON lines.
//
// Exit codes: 0 success, 1 survey found conjecture violations, 2 usage or
// parse error, 3 arithmetic overflow, 4 operational error (I/O, checkpoint).

#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nearperfect/nearperfect.hpp"

namespace np = nearperfect;
using nlohmann::ordered_json;
using np::u64;

namespace {

constexpr int kExitViolations = 1;
constexpr int kExitUsage = 2;
constexpr int kExitOverflow = 3;
constexpr int kExitOperational = 4;

// Accepts plain integers and scientific notation ("2e8", "1.5e3").
std::optional<u64> parse_u64(const std::string& s) {
  if (s.empty() || s[0] == '-' || s[0] == '+') return std::nullopt;
  if (s.find_first_of("eE.") != std::string::npos) {
    errno = 0;
    char* end = nullptr;
    const long double v = std::strtold(s.c_str(), &end);
    if (errno != 0 || end != s.c_str() + s.size()) return std::nullopt;
    if (!(v >= 0) || v >= 9.2e18L || std::rintl(v) != v) return std::nullopt;
    return static_cast<u64>(v);
  }
  try {
    std::size_t pos = 0;
    const u64 v = std::stoull(s, &pos);
    if (pos != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

struct Range {
  u64 lo;
  u64 hi;  // exclusive
};

std::optional<Range> parse_range(const std::string& s) {
  const auto sep = s.find("..");
  if (sep == std::string::npos) return std::nullopt;
  const auto lo = parse_u64(s.substr(0, sep));
  const auto hi = parse_u64(s.substr(sep + 2));
  if (!lo || !hi) return std::nullopt;
  return Range{*lo, *hi};
}

std::string factorization_str(const std::vector<np::PrimePower>& fs) {
  std::string out;
  for (const auto& [p, e] : fs) {
    if (!out.empty()) out += " * ";
    out += std::to_string(p);
    if (e > 1) out += "^" + std::to_string(e);
  }
  return out.empty() ? "1" : out;
}

ordered_json factorization_json(const std::vector<np::PrimePower>& fs) {
  auto arr = ordered_json::array();
  for (const auto& [p, e] : fs) arr.push_back({p, e});
  return arr;
}

// n as a JSON value: plain number while it fits 64 bits, decimal string above.
ordered_json bignat_json(const np::BigNat& v) {
  if (v.fits_u64()) return v.to_u64();
  return v.str();
}

bool machine = false;  // --format lines

void emit(const ordered_json& j) { std::cout << j.dump() << "\n"; }

// ---- classify ----------------------------------------------------------

void print_classification_human(const np::Classification& c,
                                const std::optional<np::NearPerfectWitness>& w, bool factor) {
  std::cout << c.n << ": " << np::to_string(c.tag) << ", sigma = " << c.sigma
            << ", abundance = " << c.abundance;
  if (w) std::cout << ", near-perfect with redundant divisor " << w->redundant;
  if (factor) std::cout << ", " << c.n << " = " << factorization_str(np::factorize(c.n).factors);
  std::cout << "\n";
}

void classify_one(u64 n, bool factor) {
  const np::Classification c = np::classify(n);
  const auto w = np::near_perfect_witness(n);
  if (machine) {
    ordered_json j;
    j["n"] = c.n;
    j["sigma"] = c.sigma;
    j["tag"] = std::string(np::to_string(c.tag));
    j["abundance"] = c.abundance;
    if (w) j["redundant"] = w->redundant;
    if (factor) j["factorization"] = factorization_json(np::factorize(n).factors);
    emit(j);
  } else {
    print_classification_human(c, w, factor);
  }
}

int cmd_classify(const std::string& target) {
  if (const auto r = parse_range(target)) {
    if (r->lo < 1 || r->lo >= r->hi) {
      std::cerr << "classify: need 1 <= lo < hi\n";
      return kExitUsage;
    }
    np::SieveOptions opts;
    for (u64 block_lo = r->lo; block_lo < r->hi;) {
      const u64 block_hi = std::min(r->hi, block_lo + opts.block_size);
      const np::SigmaSegment seg = np::sigma_segment(block_lo, block_hi, opts);
      for (std::size_t i = 0; i < seg.sigma_values.size(); ++i) {
        const u64 n = seg.lo + i;
        const u64 s = seg.sigma_values[i];
        const auto tag = s == 2 * n ? np::Tag::perfect : (s < 2 * n ? np::Tag::deficient : np::Tag::abundant);
        const auto w = np::detail::witness_from_sigma(n, s);
        const auto abundance = static_cast<std::int64_t>(s) - 2 * static_cast<std::int64_t>(n);
        if (machine) {
          ordered_json j;
          j["n"] = n;
          j["sigma"] = s;
          j["tag"] = std::string(np::to_string(tag));
          j["abundance"] = abundance;
          if (w) j["redundant"] = w->redundant;
          emit(j);
        } else {
          print_classification_human({n, s, tag, abundance}, w, false);
        }
      }
      block_lo = block_hi;
    }
    return 0;
  }
  const auto n = parse_u64(target);
  if (!n || *n < 1) {
    std::cerr << "classify: not a positive integer or lo..hi range: '" << target << "'\n";
    return kExitUsage;
  }
  classify_one(*n, true);
  return 0;
}

// ---- enumerate ---------------------------------------------------------

int cmd_enumerate(const std::optional<Range>& range, bool near_perfect, bool perfect,
                  bool pk_primes, std::optional<unsigned> t_max, unsigned rounds) {
  if (near_perfect + perfect + pk_primes != 1) {
    std::cerr << "enumerate: pick exactly one of --near-perfect, --perfect, --pk-primes\n";
    return kExitUsage;
  }
  if (pk_primes) {
    unsigned bound;
    if (t_max) {
      bound = *t_max;
    } else if (range) {
      if (range->hi < 3) {
        std::cerr << "enumerate: range bounds t, need hi >= 3\n";
        return kExitUsage;
      }
      bound = static_cast<unsigned>(range->hi - 1);
    } else {
      std::cerr << "enumerate: --pk-primes needs --t-max or a lo..hi range bounding t\n";
      return kExitUsage;
    }
    const auto primes = np::enumerate_p_primes(bound, rounds);
    if (machine) {
      for (const auto& pk : primes) {
        ordered_json j;
        j["value"] = bignat_json(pk.value);
        j["t"] = pk.t;
        j["k"] = pk.k;
        emit(j);
      }
    } else {
      std::cout << "P primes 2^t - 2^k - 1 with t <= " << bound << " (" << primes.size() << "):\n";
      for (const auto& pk : primes)
        std::cout << "  " << pk.value.str() << " = 2^" << pk.t << " - 2^" << pk.k << " - 1\n";
    }
    return 0;
  }

  if (!range || range->lo < 1 || range->lo >= range->hi) {
    std::cerr << "enumerate: need a lo..hi range with 1 <= lo < hi\n";
    return kExitUsage;
  }
  if (near_perfect) {
    const auto witnesses = np::enumerate_near_perfect(range->lo, range->hi);
    for (const auto& w : witnesses) {
      if (machine) {
        ordered_json j;
        j["n"] = w.n;
        j["sigma"] = w.sigma;
        j["redundant"] = w.redundant;
        j["factorization"] = factorization_json(np::factorize(w.n).factors);
        emit(j);
      } else {
        std::cout << w.n << ": redundant divisor " << w.redundant << ", sigma = " << w.sigma
                  << ", " << w.n << " = " << factorization_str(np::factorize(w.n).factors) << "\n";
      }
    }
    if (!machine) std::cout << witnesses.size() << " near-perfect in [" << range->lo << ", " << range->hi << ")\n";
  } else {
    const auto hits = np::scan_range(range->lo, range->hi, np::ScanPredicate::perfect);
    for (const auto& h : hits) {
      if (machine) {
        ordered_json j;
        j["n"] = h.n;
        j["sigma"] = h.sigma;
        j["tag"] = "perfect";
        emit(j);
      } else {
        std::cout << h.n << ": perfect, sigma = " << h.sigma << "\n";
      }
    }
    if (!machine) std::cout << hits.size() << " perfect in [" << range->lo << ", " << range->hi << ")\n";
  }
  return 0;
}

// ---- generate ----------------------------------------------------------

void emit_generated(const std::optional<np::GeneratedNearPerfect>& g, const std::string& provenance) {
  if (machine) {
    ordered_json j;
    j["provenance"] = provenance;
    if (g) {
      j["n"] = bignat_json(g->n);
      j["redundant"] = bignat_json(g->redundant);
      j["verified"] = g->verified;
    } else {
      j["construction"] = "none";
    }
    emit(j);
  } else {
    if (g) {
      std::cout << provenance << ": n = " << g->n.str() << ", redundant divisor " << g->redundant.str()
                << (g->verified ? " (verified)" : " (beyond 64-bit check range, unverified)") << "\n";
    } else {
      std::cout << provenance << ": no construction for these parameters\n";
    }
  }
}

int cmd_generate(int theorem, std::optional<u64> t, std::optional<u64> k, std::optional<u64> m,
                 std::optional<u64> x, std::optional<u64> p, unsigned rounds) {
  switch (theorem) {
    case 3: {
      if (!t || !k) {
        std::cerr << "generate: --theorem 3 needs --t and --k\n";
        return kExitUsage;
      }
      const auto g = np::theorem3_generate(static_cast<unsigned>(*t), static_cast<unsigned>(*k), rounds);
      emit_generated(g, np::to_string(np::Provenance{np::TheoremId::theorem3, *t, *k}));
      return 0;
    }
    case 4: {
      if (!m || !x) {
        std::cerr << "generate: --theorem 4 needs --m and --x\n";
        return kExitUsage;
      }
      const auto g = np::theorem4_generate(*m, static_cast<unsigned>(*x));
      emit_generated(g, np::to_string(np::Provenance{np::TheoremId::theorem4, *m, *x}));
      return 0;
    }
    case 5: {
      if (!p) {
        std::cerr << "generate: --theorem 5 needs --p\n";
        return kExitUsage;
      }
      const auto g = np::theorem5_generate(*p);
      emit_generated(g, np::to_string(np::Provenance{np::TheoremId::theorem5, *p, 0}));
      return 0;
    }
    default:
      std::cerr << "generate: --theorem must be 3, 4 or 5\n";
      return kExitUsage;
  }
}

// ---- survey ------------------------------------------------------------

void print_survey_human(const np::SurveyReport& rep) {
  const auto& c = rep.config;
  std::cout << "survey " << np::to_string(c.mode);
  if (c.mode == np::SurveyMode::conjecture1) std::cout << " (k=" << c.k << ")";
  std::cout << " over [" << c.lo << ", " << c.hi << ")\n";
  for (const auto& h : rep.hits) {
    std::cout << "  hit n=" << h.n << " sigma=" << h.sigma;
    if (h.redundant) std::cout << " redundant=" << *h.redundant;
    if (h.tag) std::cout << " tag=" << np::to_string(*h.tag);
    if (h.redundant_is_mersenne_prime)
      std::cout << " mersenne=" << (*h.redundant_is_mersenne_prime ? "yes" : "no");
    if (h.matches_theorem5_form)
      std::cout << " theorem5-form=" << (*h.matches_theorem5_form ? "yes" : "no");
    if (!h.factorization.empty()) std::cout << "  [" << factorization_str(h.factorization) << "]";
    std::cout << "\n";
  }
  for (const auto& v : rep.violations) {
    std::cout << "  VIOLATION ";
    if (v.n != 0) std::cout << "n=" << v.n << " ";
    if (v.redundant) std::cout << "redundant=" << *v.redundant << " ";
    if (!v.n_list.empty()) {
      std::cout << "shared by {";
      for (std::size_t i = 0; i < v.n_list.size(); ++i)
        std::cout << (i ? ", " : "") << v.n_list[i];
      std::cout << "}";
    }
    if (!v.factorization.empty()) std::cout << " [" << factorization_str(v.factorization) << "]";
    std::cout << "\n";
  }
  if (rep.config.mode == np::SurveyMode::census) {
    std::cout << "  census: deficient=" << rep.census.deficient << " perfect=" << rep.census.perfect
              << " abundant=" << rep.census.abundant << "\n";
  }
  std::cout << "  " << rep.hits.size() << " hits, " << rep.violations.size() << " violations, "
            << "completed up to " << rep.completed_up_to << ", " << std::fixed
            << std::setprecision(2) << rep.elapsed_seconds << "s\n";
  if (!rep.config.checkpoint_path.empty()) {
    if (rep.completed_up_to == rep.config.hi)
      std::cout << "  report: " << rep.config.checkpoint_path << ".report.jsonl\n";
    else
      std::cout << "  checkpoint: " << rep.config.checkpoint_path << " (run --resume to finish)\n";
  }
}

int cmd_survey(const std::string& mode_name, std::optional<unsigned> k, std::optional<u64> lo,
               std::optional<u64> hi, std::optional<unsigned> workers, std::optional<u64> segment_size,
               std::string checkpoint, bool do_resume, std::optional<u64> max_segments) {
  np::SurveyReport rep;
  if (do_resume) {
    if (checkpoint.empty()) {
      std::cerr << "survey: --resume needs --checkpoint\n";
      return kExitUsage;
    }
    np::ResumeOptions opts;
    opts.worker_count = workers;
    opts.segment_size = segment_size;
    opts.max_segments = max_segments;
    if (!mode_name.empty() || lo || hi) {
      // The caller restated the survey; make sure it is the same one.
      np::SurveyConfig expect;
      const auto mode = np::survey_mode_from_string(mode_name);
      if (!mode) {
        std::cerr << "survey: unknown mode '" << mode_name << "'\n";
        return kExitUsage;
      }
      expect.mode = *mode;
      expect.k = k.value_or(0);
      if (!lo || !hi) {
        std::cerr << "survey: --resume with a restated config needs --lo and --hi\n";
        return kExitUsage;
      }
      expect.lo = *lo;
      expect.hi = *hi;
      opts.expect = expect;
    }
    rep = np::resume(checkpoint, opts);
  } else {
    const auto mode = np::survey_mode_from_string(mode_name);
    if (!mode) {
      std::cerr << "survey: unknown mode '" << mode_name << "' (conjecture1, conjecture2, "
                   "conjecture3, odd-near-perfect, census)\n";
      return kExitUsage;
    }
    if (!lo || !hi) {
      std::cerr << "survey: --lo and --hi are required\n";
      return kExitUsage;
    }
    if (*mode == np::SurveyMode::conjecture1 && !k) {
      std::cerr << "survey: conjecture1 needs --k\n";
      return kExitUsage;
    }
    np::SurveyConfig cfg;
    cfg.mode = *mode;
    cfg.k = k.value_or(0);
    cfg.lo = *lo;
    cfg.hi = *hi;
    cfg.worker_count = workers.value_or(1);
    cfg.segment_size = segment_size.value_or(1ull << 22);
    cfg.max_segments = max_segments;
    if (checkpoint.empty()) {
      checkpoint = "survey-" + std::string(np::to_string(*mode));
      if (*mode == np::SurveyMode::conjecture1) checkpoint += "-k" + std::to_string(cfg.k);
      checkpoint += ".checkpoint";
    }
    cfg.checkpoint_path = checkpoint;
    rep = np::run_survey(cfg);
  }

  if (machine) {
    std::cout << np::report_body(rep);
    emit(np::summary_json(rep));
  } else {
    print_survey_human(rep);
  }
  return rep.violations.empty() ? 0 : kExitViolations;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"near-perfect numbers: classification, generators and conjecture surveys"};
  app.require_subcommand(1);
  std::string format = "human";
  app.add_option("--format", format, "output format: human or lines")
      ->check(CLI::IsMember({"human", "lines"}));

  // classify
  auto* sc_classify = app.add_subcommand("classify", "classify n (or every n in lo..hi)");
  std::string target;
  sc_classify->add_option("target", target, "positive integer or lo..hi range")->required();

  // enumerate
  auto* sc_enum = app.add_subcommand("enumerate", "enumerate near-perfect, perfect, or P primes");
  std::string enum_range;
  bool f_near = false, f_perfect = false, f_pk = false;
  std::optional<unsigned> t_max;
  unsigned rounds = 0;
  sc_enum->add_option("range", enum_range, "lo..hi range (exclusive hi)");
  sc_enum->add_flag("--near-perfect", f_near, "near-perfect numbers with redundant divisors");
  sc_enum->add_flag("--perfect", f_perfect, "perfect numbers");
  sc_enum->add_flag("--pk-primes", f_pk, "primes 2^t - 2^k - 1");
  sc_enum->add_option("--t-max", t_max, "largest t for --pk-primes");
  sc_enum->add_option("--rounds", rounds, "extra probable-prime rounds beyond the base battery");

  // generate
  auto* sc_gen = app.add_subcommand("generate", "run a constructive theorem");
  int theorem = 0;
  std::optional<u64> g_t, g_k, g_m, g_x, g_p;
  unsigned g_rounds = 0;
  sc_gen->add_option("--theorem", theorem, "3, 4 or 5")->required();
  sc_gen->add_option("--t", g_t, "theorem 3: exponent t");
  sc_gen->add_option("--k", g_k, "theorem 3: exponent k");
  sc_gen->add_option("--m", g_m, "theorem 4: even perfect number");
  sc_gen->add_option("--x", g_x, "theorem 4: power of two multiplier exponent");
  sc_gen->add_option("--p", g_p, "theorem 5: Mersenne exponent");
  sc_gen->add_option("--rounds", g_rounds, "extra probable-prime rounds");

  // survey
  auto* sc_survey = app.add_subcommand("survey", "range survey with checkpoint and report files");
  std::string mode_name;
  std::optional<unsigned> s_k;
  std::string s_lo, s_hi;
  std::optional<unsigned> workers;
  std::optional<u64> segment_size;
  std::string checkpoint;
  bool do_resume = false;
  std::optional<u64> max_segments;
  sc_survey->add_option("--mode", mode_name,
                        "conjecture1 | conjecture2 | conjecture3 | odd-near-perfect | census");
  sc_survey->add_option("--k", s_k, "conjecture1: redundant divisor 2^k");
  sc_survey->add_option("--lo", s_lo, "range start (inclusive)");
  sc_survey->add_option("--hi", s_hi, "range end (exclusive), scientific notation ok");
  sc_survey->add_option("--workers", workers, "worker thread count")->envname("NEARPERFECT_WORKERS");
  sc_survey->add_option("--segment-size", segment_size, "numbers per work segment")
      ->envname("NEARPERFECT_SEGMENT_SIZE");
  sc_survey->add_option("--checkpoint", checkpoint, "checkpoint path (reports derive from it)");
  sc_survey->add_flag("--resume", do_resume, "continue from an existing checkpoint");
  sc_survey->add_option("--max-segments", max_segments, "stop after this many segments (resumable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }
  machine = format == "lines";

  try {
    if (*sc_classify) return cmd_classify(target);
    if (*sc_enum)
      return cmd_enumerate(enum_range.empty() ? std::nullopt : parse_range(enum_range), f_near,
                           f_perfect, f_pk, t_max, rounds);
    if (*sc_gen) return cmd_generate(theorem, g_t, g_k, g_m, g_x, g_p, g_rounds);
    if (*sc_survey) {
      std::optional<u64> lo, hi;
      if (!s_lo.empty()) {
        lo = parse_u64(s_lo);
        if (!lo) {
          std::cerr << "survey: bad --lo '" << s_lo << "'\n";
          return kExitUsage;
        }
      }
      if (!s_hi.empty()) {
        hi = parse_u64(s_hi);
        if (!hi) {
          std::cerr << "survey: bad --hi '" << s_hi << "'\n";
          return kExitUsage;
        }
      }
      return cmd_survey(mode_name, s_k, lo, hi, workers, segment_size, checkpoint, do_resume,
                        max_segments);
    }
  } catch (const std::overflow_error& e) {
    std::cerr << "overflow: " << e.what() << "\n";
    return kExitOverflow;
  } catch (const np::ConfigMismatchError& e) {
    std::cerr << e.what() << "\n";
    return kExitOperational;
  } catch (const np::CheckpointError& e) {
    std::cerr << e.what() << "\n";
    return kExitOperational;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::range_error& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitOperational;
  }
  return 0;
}
