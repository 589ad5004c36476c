#pragma once

#include <bit>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nearperfect/arith.hpp"
#include "nearperfect/classify.hpp"
#include "nearperfect/parallel.hpp"
#include "nearperfect/sieve.hpp"

namespace nearperfect {

enum class SurveyMode { conjecture1, conjecture2, conjecture3, odd_near_perfect, census };

inline std::string_view to_string(SurveyMode m) {
  switch (m) {
    case SurveyMode::conjecture1: return "conjecture1";
    case SurveyMode::conjecture2: return "conjecture2";
    case SurveyMode::conjecture3: return "conjecture3";
    case SurveyMode::odd_near_perfect: return "odd-near-perfect";
    case SurveyMode::census: return "census";
  }
  return "?";
}

inline std::optional<SurveyMode> survey_mode_from_string(std::string_view s) {
  if (s == "conjecture1") return SurveyMode::conjecture1;
  if (s == "conjecture2") return SurveyMode::conjecture2;
  if (s == "conjecture3") return SurveyMode::conjecture3;
  if (s == "odd-near-perfect") return SurveyMode::odd_near_perfect;
  if (s == "census") return SurveyMode::census;
  return std::nullopt;
}

struct SurveyConfig {
  SurveyMode mode = SurveyMode::census;
  unsigned k = 0;  // conjecture1: the fixed redundant divisor is 2^k
  u64 lo = 1;
  u64 hi = 0;
  u64 segment_size = 1ull << 22;
  unsigned worker_count = 1;
  std::string checkpoint_path;      // empty: no files, everything in memory
  std::optional<u64> max_segments;  // budget this call; finish later via resume
};

// One hit or violation line of a report. Fields that do not apply to the
// record's mode stay unset and are omitted from the serialized form.
struct SurveyRecord {
  std::string kind = "hit";  // "hit" | "violation"
  u64 n = 0;                 // 0 for divisor-keyed records (conjecture3 groups)
  u64 sigma = 0;
  std::optional<u64> redundant;
  std::optional<Tag> tag;  // census
  std::vector<PrimePower> factorization;
  std::optional<bool> redundant_is_mersenne_prime;  // conjecture2
  std::optional<bool> matches_theorem5_form;        // conjecture2
  std::vector<u64> n_list;                          // conjecture3 violation groups
};

struct CensusCounts {
  u64 deficient = 0;
  u64 perfect = 0;
  u64 abundant = 0;
};

struct SurveyReport {
  SurveyConfig config;
  std::vector<SurveyRecord> hits;
  std::vector<SurveyRecord> violations;
  CensusCounts census;  // census mode only
  u64 completed_up_to = 0;
  double elapsed_seconds = 0.0;
};

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline u64 fnv1a64(std::string_view s) {
  u64 h = 1469598103934665603ull;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

// The semantic identity of a survey. Worker count and segment size are
// runtime knobs: they never change the report body, so they stay out.
inline std::string config_identity(const SurveyConfig& c) {
  std::ostringstream os;
  os << to_string(c.mode) << '|' << c.k << '|' << c.lo << '|' << c.hi;
  return os.str();
}

inline std::string config_hash_hex(const SurveyConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_identity(c))));
  return buf;
}

}  // namespace detail

inline nlohmann::ordered_json record_to_json(const SurveyRecord& r, SurveyMode mode) {
  nlohmann::ordered_json j;
  j["kind"] = r.kind;
  j["mode"] = std::string(to_string(mode));
  if (r.n != 0) {
    j["n"] = r.n;
    j["sigma"] = r.sigma;
  }
  if (r.tag) j["tag"] = std::string(to_string(*r.tag));
  if (r.redundant) j["redundant"] = *r.redundant;
  if (!r.factorization.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [p, e] : r.factorization) arr.push_back({p, e});
    j["factorization"] = std::move(arr);
  }
  if (r.redundant_is_mersenne_prime) j["redundant_is_mersenne_prime"] = *r.redundant_is_mersenne_prime;
  if (r.matches_theorem5_form) j["matches_theorem5_form"] = *r.matches_theorem5_form;
  if (!r.n_list.empty()) j["n_list"] = r.n_list;
  return j;
}

inline SurveyRecord record_from_json(const nlohmann::ordered_json& j) {
  SurveyRecord r;
  r.kind = j.at("kind").get<std::string>();
  if (j.contains("n")) {
    r.n = j.at("n").get<u64>();
    r.sigma = j.at("sigma").get<u64>();
  }
  if (j.contains("tag")) {
    const auto s = j.at("tag").get<std::string>();
    r.tag = s == "deficient" ? Tag::deficient : s == "perfect" ? Tag::perfect : Tag::abundant;
  }
  if (j.contains("redundant")) r.redundant = j.at("redundant").get<u64>();
  if (j.contains("factorization"))
    for (const auto& pe : j.at("factorization"))
      r.factorization.push_back({pe.at(0).get<u64>(), pe.at(1).get<unsigned>()});
  if (j.contains("redundant_is_mersenne_prime"))
    r.redundant_is_mersenne_prime = j.at("redundant_is_mersenne_prime").get<bool>();
  if (j.contains("matches_theorem5_form"))
    r.matches_theorem5_form = j.at("matches_theorem5_form").get<bool>();
  if (j.contains("n_list")) r.n_list = j.at("n_list").get<std::vector<u64>>();
  return r;
}

// The report body: every hit, then every violation, one JSON object per
// line. Byte-identical for a given (mode, k, lo, hi) no matter how many
// workers or what segment size produced it.
inline std::string report_body(const SurveyReport& rep) {
  std::string out;
  for (const auto& r : rep.hits) out += record_to_json(r, rep.config.mode).dump() + "\n";
  for (const auto& r : rep.violations) out += record_to_json(r, rep.config.mode).dump() + "\n";
  return out;
}

inline nlohmann::ordered_json summary_json(const SurveyReport& rep) {
  nlohmann::ordered_json j;
  j["mode"] = std::string(to_string(rep.config.mode));
  if (rep.config.mode == SurveyMode::conjecture1) j["k"] = rep.config.k;
  j["lo"] = rep.config.lo;
  j["hi"] = rep.config.hi;
  j["completed_up_to"] = rep.completed_up_to;
  j["hit_count"] = rep.hits.size();
  j["violation_count"] = rep.violations.size();
  if (rep.config.mode == SurveyMode::census) {
    j["census"] = {{"deficient", rep.census.deficient},
                   {"perfect", rep.census.perfect},
                   {"abundant", rep.census.abundant}};
  }
  if (rep.config.mode == SurveyMode::conjecture3) {
    std::map<u64, u64> mult;
    u64 ones = 0;
    for (const auto& r : rep.hits) {
      ++mult[*r.redundant];
      if (*r.redundant == 1) ++ones;
    }
    auto table = nlohmann::ordered_json::object();
    for (const auto& [d, c] : mult) table[std::to_string(d)] = c;
    j["redundant_multiplicity"] = std::move(table);
    // 1 = 2^0 is treated as a power of two (exempt from violations); its
    // multiplicity is reported on its own so the reader can decide.
    j["redundant_one_count"] = ones;
  }
  j["elapsed_seconds"] = rep.elapsed_seconds;
  return j;
}

namespace detail {

struct SegmentResult {
  std::vector<SurveyRecord> hits;
  CensusCounts census;
};

inline SurveyRecord near_perfect_record(const NearPerfectWitness& w) {
  SurveyRecord r;
  r.n = w.n;
  r.sigma = w.sigma;
  r.redundant = w.redundant;
  r.factorization = factorize(w.n).factors;
  return r;
}

inline void annotate_conjecture2(SurveyRecord& r) {
  const u64 d = *r.redundant;
  bool mersenne = false;
  bool t5 = false;
  if (std::has_single_bit(d + 1)) {
    const unsigned e = static_cast<unsigned>(std::countr_zero(d + 1));
    mersenne = e >= 2 && is_prime_u64(e) && lucas_lehmer(e);
    if (mersenne) {
      const u128 dd = u128(d) * d;
      t5 = u128(r.n) % dd == 0 && u128(r.n) / dd == (u128(1) << (e - 1));
    }
  }
  r.redundant_is_mersenne_prime = mersenne;
  r.matches_theorem5_form = t5;
}

inline SegmentResult survey_segment(const SurveyConfig& cfg, u64 seg_lo, u64 seg_hi,
                                    const SieveOptions& sopts) {
  SegmentResult res;
  switch (cfg.mode) {
    case SurveyMode::odd_near_perfect: {
      for (const ScanHit& h :
           scan_range(seg_lo, seg_hi, ScanPredicate::odd_near_perfect_candidate, sopts))
        if (const auto w = witness_from_sigma(h.n, h.sigma))
          res.hits.push_back(near_perfect_record(*w));
      break;
    }
    case SurveyMode::conjecture1: {
      if (cfg.k > 63) break;  // 2^k exceeds any proper divisor of a 64-bit n
      const u64 target = u64{1} << cfg.k;
      for (const ScanHit& h :
           scan_range(seg_lo, seg_hi, ScanPredicate::near_perfect_candidate, sopts))
        if (const auto w = witness_from_sigma(h.n, h.sigma); w && w->redundant == target)
          res.hits.push_back(near_perfect_record(*w));
      break;
    }
    case SurveyMode::conjecture2: {
      for (const ScanHit& h :
           scan_range(seg_lo, seg_hi, ScanPredicate::near_perfect_candidate, sopts))
        if (const auto w = witness_from_sigma(h.n, h.sigma);
            w && w->n % 2 == 0 && w->redundant % 2 == 1) {
          SurveyRecord r = near_perfect_record(*w);
          annotate_conjecture2(r);
          res.hits.push_back(std::move(r));
        }
      break;
    }
    case SurveyMode::conjecture3: {
      for (const ScanHit& h :
           scan_range(seg_lo, seg_hi, ScanPredicate::near_perfect_candidate, sopts))
        if (const auto w = witness_from_sigma(h.n, h.sigma))
          res.hits.push_back(near_perfect_record(*w));
      break;
    }
    case SurveyMode::census: {
      for (u64 block_lo = seg_lo; block_lo < seg_hi;) {
        const u64 block_hi = std::min(seg_hi, block_lo + sopts.block_size);
        const SigmaSegment seg = sigma_segment(block_lo, block_hi, sopts);
        for (std::size_t i = 0; i < seg.sigma_values.size(); ++i) {
          const u64 n = seg.lo + i;
          const u64 sig = seg.sigma_values[i];
          if (sig < 2 * n) {
            ++res.census.deficient;
          } else if (sig == 2 * n) {
            ++res.census.perfect;
            SurveyRecord r;
            r.n = n;
            r.sigma = sig;
            r.tag = Tag::perfect;
            r.factorization = factorize(n).factors;
            res.hits.push_back(std::move(r));
          } else {
            ++res.census.abundant;
            if (const auto w = witness_from_sigma(n, sig)) {
              SurveyRecord r = near_perfect_record(*w);
              r.tag = Tag::abundant;
              res.hits.push_back(std::move(r));
            }
          }
        }
        block_lo = block_hi;
      }
      break;
    }
  }
  return res;
}

inline void finalize_violations(SurveyReport& rep) {
  rep.violations.clear();
  switch (rep.config.mode) {
    case SurveyMode::conjecture2: {
      for (const auto& h : rep.hits)
        if (h.redundant_is_mersenne_prime && !*h.redundant_is_mersenne_prime) {
          SurveyRecord v = h;
          v.kind = "violation";
          rep.violations.push_back(std::move(v));
        }
      break;
    }
    case SurveyMode::conjecture3: {
      std::map<u64, std::vector<u64>> by_divisor;
      for (const auto& h : rep.hits) by_divisor[*h.redundant].push_back(h.n);
      for (const auto& [d, ns] : by_divisor) {
        if (std::has_single_bit(d)) continue;  // powers of two (and 1) are exempt
        if (ns.size() < 2) continue;
        SurveyRecord v;
        v.kind = "violation";
        v.redundant = d;
        v.n_list = ns;
        rep.violations.push_back(std::move(v));
      }
      break;
    }
    default:
      break;  // conjecture1, odd search and census cannot be violated
  }
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("survey: cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string checkpoint_text(const SurveyReport& rep) {
  const auto& c = rep.config;
  std::ostringstream os;
  os << "nearperfect-checkpoint v1\n";
  os << "mode " << to_string(c.mode) << "\n";
  os << "k " << c.k << "\n";
  os << "lo " << c.lo << "\n";
  os << "hi " << c.hi << "\n";
  os << "config_hash " << config_hash_hex(c) << "\n";
  os << "segment_size " << c.segment_size << "\n";
  os << "worker_count " << c.worker_count << "\n";
  os << "completed_up_to " << rep.completed_up_to << "\n";
  os << "census " << rep.census.deficient << " " << rep.census.perfect << " "
     << rep.census.abundant << "\n";
  os << "hits " << rep.hits.size() << "\n";
  for (const auto& h : rep.hits) os << record_to_json(h, c.mode).dump() << "\n";
  return os.str();
}

inline void write_checkpoint(const SurveyReport& rep) {
  write_file_atomic(rep.config.checkpoint_path, checkpoint_text(rep));
}

inline void write_report_files(const SurveyReport& rep) {
  const std::string base = rep.config.checkpoint_path;
  write_file_atomic(base + ".report.jsonl", report_body(rep));
  write_file_atomic(base + ".summary.json", summary_json(rep).dump(2) + "\n");
}

inline SurveyReport load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("resume: cannot open checkpoint " + path);
  std::string line;
  const auto next = [&](std::string_view key) {
    if (!std::getline(f, line)) throw CheckpointError("resume: truncated checkpoint " + path);
    if (line.rfind(key, 0) != 0 || (line.size() > key.size() && line[key.size()] != ' '))
      throw CheckpointError("resume: malformed checkpoint line '" + line + "'");
    return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
  };

  if (!std::getline(f, line) || line != "nearperfect-checkpoint v1")
    throw CheckpointError("resume: not a checkpoint file: " + path);

  SurveyReport rep;
  auto& cfg = rep.config;
  const auto mode = survey_mode_from_string(next("mode"));
  if (!mode) throw CheckpointError("resume: unknown survey mode in " + path);
  cfg.mode = *mode;
  try {
    cfg.k = static_cast<unsigned>(std::stoul(next("k")));
    cfg.lo = std::stoull(next("lo"));
    cfg.hi = std::stoull(next("hi"));
    const std::string stored_hash = next("config_hash");
    if (stored_hash.size() != 16 ||
        stored_hash.find_first_not_of("0123456789abcdef") != std::string::npos)
      throw CheckpointError("resume: malformed config hash in " + path);
    if (stored_hash != config_hash_hex(cfg))
      throw ConfigMismatchError("resume: checkpoint config does not match its hash (edited?)");
    cfg.segment_size = std::stoull(next("segment_size"));
    cfg.worker_count = static_cast<unsigned>(std::stoul(next("worker_count")));
    rep.completed_up_to = std::stoull(next("completed_up_to"));
    std::istringstream cs(next("census"));
    cs >> rep.census.deficient >> rep.census.perfect >> rep.census.abundant;
    if (!cs) throw CheckpointError("resume: bad census line in " + path);
    const u64 hit_count = std::stoull(next("hits"));
    rep.hits.reserve(hit_count);
    for (u64 i = 0; i < hit_count; ++i) {
      if (!std::getline(f, line)) throw CheckpointError("resume: truncated hit records in " + path);
      rep.hits.push_back(record_from_json(nlohmann::ordered_json::parse(line)));
    }
  } catch (const ConfigMismatchError&) {
    throw;
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointError("resume: cannot parse checkpoint " + path + ": " + e.what());
  }
  if (rep.completed_up_to < cfg.lo || rep.completed_up_to > cfg.hi)
    throw CheckpointError("resume: completed_up_to outside survey range in " + path);
  cfg.checkpoint_path = path;
  return rep;
}

inline void validate_config(const SurveyConfig& cfg) {
  if (cfg.lo < 1 || cfg.lo >= cfg.hi) throw std::range_error("survey: need 1 <= lo < hi");
  if (cfg.hi > SieveOptions{}.max_hi)  // fail before scanning, not 2^42 numbers in
    throw std::range_error("survey: hi exceeds the sieve's configured bound");
  if (cfg.segment_size < 1) throw std::range_error("survey: segment_size must be positive");
  if (cfg.worker_count < 1) throw std::range_error("survey: worker_count must be positive");
  if (cfg.mode == SurveyMode::conjecture1 && cfg.k < 1)
    throw std::range_error("survey: conjecture1 needs k >= 1");
}

// Shared driver for fresh runs and resumes: processes the still-missing
// segments, checkpointing at every boundary, and finalizes when the range
// is complete.
inline SurveyReport drive(SurveyReport rep) {
  const auto t0 = std::chrono::steady_clock::now();
  const SurveyConfig& cfg = rep.config;
  SieveOptions sopts;
  sopts.block_size = cfg.segment_size;
  const bool persist = !cfg.checkpoint_path.empty();

  if (rep.completed_up_to < cfg.hi) {
    u64 run_hi = cfg.hi;
    if (cfg.max_segments) {
      const u128 span = u128(*cfg.max_segments) * cfg.segment_size;
      if (span < cfg.hi - rep.completed_up_to) run_hi = rep.completed_up_to + static_cast<u64>(span);
    }
    if (persist) write_checkpoint(rep);  // resumable even before the first boundary
    run_segments_ordered(
        rep.completed_up_to, run_hi, cfg.segment_size, cfg.worker_count,
        [&cfg, &sopts](u64 a, u64 b) { return survey_segment(cfg, a, b, sopts); },
        [&rep, persist](u64, u64 b, SegmentResult&& res) {
          for (auto& r : res.hits) rep.hits.push_back(std::move(r));
          rep.census.deficient += res.census.deficient;
          rep.census.perfect += res.census.perfect;
          rep.census.abundant += res.census.abundant;
          rep.completed_up_to = b;
          if (persist) write_checkpoint(rep);
        });
  }

  rep.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (rep.completed_up_to == cfg.hi) {
    finalize_violations(rep);
    if (persist) {
      write_checkpoint(rep);
      write_report_files(rep);
    }
  }
  return rep;
}

}  // namespace detail

// Fresh survey run. Overwrites any previous checkpoint at the configured
// path; use resume() to continue an interrupted run instead. Concurrent
// surveys must use distinct checkpoint paths.
inline SurveyReport run_survey(const SurveyConfig& cfg) {
  detail::validate_config(cfg);
  SurveyReport rep;
  rep.config = cfg;
  rep.completed_up_to = cfg.lo;
  return detail::drive(std::move(rep));
}

struct ResumeOptions {
  std::optional<SurveyConfig> expect;  // mode/k/lo/hi must match the checkpoint
  std::optional<unsigned> worker_count;
  std::optional<u64> segment_size;
  std::optional<u64> max_segments;
};

// Continues (or just reloads, if already complete) the survey recorded at
// checkpoint_path. The finished report is identical to an uninterrupted
// run with the same config.
inline SurveyReport resume(const std::string& checkpoint_path, const ResumeOptions& opts = {}) {
  SurveyReport rep = detail::load_checkpoint(checkpoint_path);
  if (opts.expect) {
    const SurveyConfig& e = *opts.expect;
    if (e.mode != rep.config.mode || e.k != rep.config.k || e.lo != rep.config.lo ||
        e.hi != rep.config.hi)
      throw ConfigMismatchError("resume: requested config disagrees with checkpoint " +
                                checkpoint_path);
  }
  if (opts.worker_count) rep.config.worker_count = *opts.worker_count;
  if (opts.segment_size) rep.config.segment_size = *opts.segment_size;
  rep.config.max_segments = opts.max_segments;
  detail::validate_config(rep.config);
  return detail::drive(std::move(rep));
}

// Evidence scan for "there are infinitely many near-perfect numbers with
// redundant divisor 2^k": counts the hits; a finite range cannot refute
// it, so violations stay empty.
inline SurveyReport survey_conjecture1(unsigned k, u64 lo, u64 hi, SurveyConfig base = {}) {
  base.mode = SurveyMode::conjecture1;
  base.k = k;
  base.lo = lo;
  base.hi = hi;
  return run_survey(base);
}

// Scan for even near-perfect numbers with odd redundant divisor; any whose
// divisor is not a Mersenne prime is a counterexample and lands in the
// violations list.
inline SurveyReport survey_conjecture2(u64 lo, u64 hi, SurveyConfig base = {}) {
  base.mode = SurveyMode::conjecture2;
  base.lo = lo;
  base.hi = hi;
  return run_survey(base);
}

// Scan building the redundant-divisor multiplicity table; a non-power-of-2
// divisor shared by two or more near-perfect numbers is a counterexample.
inline SurveyReport survey_conjecture3(u64 lo, u64 hi, SurveyConfig base = {}) {
  base.mode = SurveyMode::conjecture3;
  base.lo = lo;
  base.hi = hi;
  return run_survey(base);
}

// Odd-only near-perfect scan (the known example below 2*10^12 is
// 173369889; even n are skipped at the sieve level).
inline SurveyReport survey_odd_near_perfect(u64 lo, u64 hi, SurveyConfig base = {}) {
  base.mode = SurveyMode::odd_near_perfect;
  base.lo = lo;
  base.hi = hi;
  return run_survey(base);
}

}  // namespace nearperfect
