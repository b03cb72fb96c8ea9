#pragma once

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tinspec/tinspec.hpp"

namespace tinspec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitSolverFailure = 3;

struct RunConfig {
  std::string subcommand;
  std::optional<std::string> cov_path;
  std::optional<std::string> cov_inline;
  std::optional<std::string> matrix_path;  // subset-tin on a general matrix
  std::optional<std::string> ar_path;      // spectrum of an AR model given as JSON
  std::string format = "csv";
  std::size_t n_grid = kDefaultGridSize;
  std::size_t n_lags = 30;  // largest output lag for completions
  std::size_t n_max = 0;    // tin rows; 0 = every available order
  std::size_t k = 0;        // subset size; 0 = every k
  std::size_t samples = 20000;
  std::string method = "maxent";
  std::string variant = "comb";
  std::string model = "maxent";
  bool log_s = false;
  bool inv_s = false;
  std::uint64_t seed = kDefaultSeed;
  double tolerance = 1e-8;
};

/// --seed wins over TINSPEC_SEED, which wins over the default.
inline std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const char* env) {
  if (flag) return *flag;
  if (env && *env) {
    const std::string s = env;
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      throw InvalidInput("TINSPEC_SEED is not an unsigned integer");
    }
    if (used != s.size() || s.front() == '-') throw InvalidInput("TINSPEC_SEED is not an unsigned integer");
    return v;
  }
  return kDefaultSeed;
}

namespace detail {

inline CovarianceSequence input_sequence(const RunConfig& cfg) {
  if (cfg.cov_path && cfg.cov_inline) throw InvalidInput("give either --cov or --c, not both");
  if (cfg.cov_path) return io::load_covariance(*cfg.cov_path);
  if (cfg.cov_inline) return io::parse_covariance_list(*cfg.cov_inline);
  throw InvalidInput("no covariance input (use --cov or --c)");
}

inline void require_format(const RunConfig& cfg) {
  if (cfg.format != "csv" && cfg.format != "json") throw InvalidInput("--format must be csv or json");
}

inline void require_admissible(const CovarianceSequence& seq) {
  if (!is_admissible(seq)) throw InvalidInput("covariance sequence is not admissible");
}

inline bool non_decreasing(const std::vector<TinValue>& m) {
  for (std::size_t i = 0; i + 1 < m.size(); ++i) {
    if (m[i + 1] < m[i]) return false;
  }
  return true;
}

inline GeneralCovariance load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::vector<std::vector<double>> rows;
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    io::json j;
    try {
      j = io::json::parse(in);
    } catch (const io::json::exception& e) {
      throw InvalidInput(std::string("malformed JSON: ") + e.what());
    }
    const auto& m = j.is_object() ? j.at("matrix") : j;
    for (const auto& r : m) {
      std::vector<double> row;
      for (const auto& v : r) row.push_back(io::number_from_json(v));
      rows.push_back(std::move(row));
    }
  } else {
    std::string line;
    while (std::getline(in, line)) {
      line = io::detail::trim(line);
      if (line.empty() || line.front() == '#') continue;
      std::vector<double> row;
      for (const auto& tok : io::detail::split(line, ',')) row.push_back(io::detail::parse_double(tok));
      rows.push_back(std::move(row));
    }
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n) {
      throw InvalidInput("matrix must be square");
    }
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return GeneralCovariance(std::move(c));
}

inline RarFitOptions rar_options(const RunConfig& cfg) {
  RarFitOptions opt;
  opt.n_grid = cfg.n_grid;
  opt.seed = cfg.seed;
  opt.tolerance = cfg.tolerance;
  return opt;
}

}  // namespace detail

/// Rows n, M_n, 1/M_n for n = 1..n_max plus a monotonicity flag.
inline int cmd_tin(const RunConfig& cfg, std::ostream& out) {
  detail::require_format(cfg);
  const auto seq = detail::input_sequence(cfg);
  detail::require_admissible(seq);
  const std::size_t n_max = cfg.n_max == 0 ? seq.size() : cfg.n_max;
  if (n_max > seq.size()) throw InvalidInput("--n exceeds the number of lags");
  const auto m = tin_sequence(seq, n_max);
  const bool mono = detail::non_decreasing(m);
  if (cfg.format == "json") {
    io::json j{{"n", io::json::array()}, {"M", io::json::array()}, {"inv_M", io::json::array()}};
    for (std::size_t n = 0; n < m.size(); ++n) {
      j["n"].push_back(n + 1);
      j["M"].push_back(io::json_number(m[n].to_double()));
      j["inv_M"].push_back(m[n].reciprocal());
    }
    j["non_decreasing"] = mono;
    out << j.dump(2) << '\n';
  } else {
    out << "n,M_n,inv_M_n\n";
    for (std::size_t n = 0; n < m.size(); ++n) {
      out << n + 1 << ',' << io::format_tin(m[n]) << ',' << io::format_number(m[n].reciprocal()) << '\n';
    }
    out << "# non_decreasing," << (mono ? "true" : "false") << '\n';
  }
  return kExitOk;
}

inline CompletionResult run_completion(const RunConfig& cfg, const CovarianceSequence& seq) {
  const auto method = parse_completion_method(cfg.method);
  if (!method) throw InvalidInput("unknown --method '" + cfg.method + "'");
  if (cfg.n_lags + 1 < seq.size()) throw InvalidInput("--lags is below the prefix length");
  switch (*method) {
    case CompletionMethod::maxent: return maxent_extend(seq, cfg.n_lags);
    case CompletionMethod::mintin_step: return mintin_step(seq);
    case CompletionMethod::mintin_greedy: return greedy_mintin_extend(seq, cfg.n_lags);
    case CompletionMethod::mintin_rar: return rar_extend(seq, cfg.n_lags, detail::rar_options(cfg));
    case CompletionMethod::maxtin: {
      if (cfg.variant != "comb" && cfg.variant != "periodic") throw InvalidInput("--variant must be comb or periodic");
      return maxtin_construct(seq, cfg.variant == "comb" ? MaxTinVariant::comb : MaxTinVariant::periodic,
                              cfg.n_lags);
    }
  }
  throw InvalidInput("unknown method");
}

/// Completion result as JSON (default) or the extended lags as CSV.
inline int cmd_complete(const RunConfig& cfg, std::ostream& out) {
  detail::require_format(cfg);
  const auto seq = detail::input_sequence(cfg);
  const auto result = run_completion(cfg, seq);
  if (cfg.format == "json") {
    out << io::to_json(result).dump(2) << '\n';
  } else {
    io::write_covariance_csv(out, result.covariances);
  }
  return kExitOk;
}

/// Spectrum on the grid: of an AR model (--ar), or of a completion of the
/// covariance input selected by --model (maxent, mintin-rar, finite, maxtin).
inline int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  if (cfg.n_grid < 2) throw InvalidInput("--grid must be at least 2");
  const io::SpectrumColumns cols{cfg.log_s, cfg.inv_s};
  if (cfg.ar_path) {
    std::ifstream in(*cfg.ar_path);
    if (!in) throw InvalidInput("cannot open " + *cfg.ar_path);
    io::json j;
    try {
      j = io::json::parse(in);
    } catch (const io::json::exception& e) {
      throw InvalidInput(std::string("malformed JSON: ") + e.what());
    }
    io::write_spectrum_csv(out, psd_from_ar(io::ar_model_from_json(j), cfg.n_grid), cols);
    return kExitOk;
  }
  const auto seq = detail::input_sequence(cfg);
  std::string model = cfg.model;
  for (char& ch : model) {
    if (ch == '_') ch = '-';
  }
  if (model == "maxent") {
    io::write_spectrum_csv(out, psd_from_ar(yule_walker_fit(seq), cfg.n_grid), cols);
  } else if (model == "mintin-rar") {
    const auto fit = rar_fit(seq, detail::rar_options(cfg));
    if (!fit.converged) throw SolverFailure("rar_fit did not converge", fit.residual_norm);
    io::write_spectrum_csv(out, psd_rar(fit.spectrum, cfg.n_grid), cols);
  } else if (model == "finite") {
    io::write_spectrum_csv(out, psd_from_finite_covariance(seq, cfg.n_grid), cols);
  } else if (model == "maxtin") {
    const auto r = maxtin_construct(seq, MaxTinVariant::comb, seq.size() - 1);
    io::write_spectrum_csv(out, maxtin_comb_spectrum(r, cfg.n_grid), cols);
  } else {
    throw InvalidInput("unknown --model '" + cfg.model + "'");
  }
  return kExitOk;
}

/// M_k^(n) for one k or for every k, from a general matrix (--matrix) or
/// the Toeplitz matrix of the covariance input.
inline int cmd_subset_tin(const RunConfig& cfg, std::ostream& out) {
  detail::require_format(cfg);
  const GeneralCovariance c = [&] {
    if (cfg.matrix_path) return detail::load_matrix(*cfg.matrix_path);
    const auto seq = detail::input_sequence(cfg);
    detail::require_admissible(seq);
    return GeneralCovariance(ToeplitzCovariance(seq, seq.size()).matrix());
  }();
  if (cfg.k > c.size()) throw InvalidInput("--k exceeds the matrix size");

  std::vector<std::size_t> ks;
  if (cfg.k > 0) {
    ks.push_back(cfg.k);
  } else {
    for (std::size_t k = 1; k <= c.size(); ++k) ks.push_back(k);
  }
  std::vector<TinValue> values;
  std::vector<double> errors;
  for (std::size_t k : ks) {
    if (c.size() <= kExactSubsetCap) {
      values.push_back(k_of_n_tin_exact(c, k));
      errors.push_back(0.0);
    } else {
      const auto s = k_of_n_tin_sampled(c, k, cfg.samples, cfg.seed);
      values.push_back(s.estimate);
      errors.push_back(s.standard_error);
    }
  }
  const bool mono = detail::non_decreasing(values);
  if (cfg.format == "json") {
    io::json j{{"n", c.size()}, {"k", ks}, {"M", io::json::array()}, {"standard_error", errors}};
    for (const auto& v : values) j["M"].push_back(io::json_number(v.to_double()));
    if (ks.size() > 1) j["non_decreasing"] = mono;
    out << j.dump(2) << '\n';
  } else {
    out << "k,M_k,standard_error\n";
    for (std::size_t i = 0; i < ks.size(); ++i) {
      out << ks[i] << ',' << io::format_tin(values[i]) << ',' << io::format_number(errors[i]) << '\n';
    }
    if (ks.size() > 1) out << "# non_decreasing," << (mono ? "true" : "false") << '\n';
  }
  return kExitOk;
}

/// Finite-support admissible continuation of the input lags.
inline int cmd_ma_match(const RunConfig& cfg, std::ostream& out) {
  detail::require_format(cfg);
  const auto seq = detail::input_sequence(cfg);
  const auto ma = ma_match(seq);
  if (cfg.format == "json") {
    out << io::json{{"k", ma.k}, {"q", ma.k - 1}, {"c", io::to_json(ma.covariances)}}.dump(2) << '\n';
  } else {
    out << "# k," << ma.k << '\n';
    io::write_covariance_csv(out, ma.covariances);
  }
  return kExitOk;
}

/// Runs one subcommand and maps library errors onto exit codes.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.n_grid < 2) throw InvalidInput("--grid must be at least 2");
    if (!(cfg.tolerance > 0.0)) throw InvalidInput("--tol must be positive");
    if (cfg.subcommand == "tin") return cmd_tin(cfg, out);
    if (cfg.subcommand == "complete") return cmd_complete(cfg, out);
    if (cfg.subcommand == "spectrum") return cmd_spectrum(cfg, out);
    if (cfg.subcommand == "subset-tin") return cmd_subset_tin(cfg, out);
    if (cfg.subcommand == "ma-match") return cmd_ma_match(cfg, out);
    throw InvalidInput("unknown subcommand '" + cfg.subcommand + "'");
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << " (residual " << io::format_number(e.residual()) << ")\n";
    return kExitSolverFailure;
  } catch (const NumericalDegeneracy& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitSolverFailure;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const SingularMatrix& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvalidInput;
  }
}

}  // namespace tinspec::cli
