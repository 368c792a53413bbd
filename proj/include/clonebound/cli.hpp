// Copyright 2026 The clonebound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Subcommands: bound, estimate, oracle, sweep,
// check, rand. Exit codes: 0 success, 2 input or validation error,
// 3 numerical failure.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "clonebound/bounds.hpp"
#include "clonebound/error.hpp"
#include "clonebound/io.hpp"
#include "clonebound/oracle.hpp"
#include "clonebound/states.hpp"

namespace clonebound::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr const char* kSeedEnv = "CLONEBOUND_SEED";

enum class Format { Json, Csv, Text };

struct RunConfig {
  std::string command;
  std::string input_path;  // "-" reads standard input
  std::string output_path;
  Format format = Format::Json;
  std::optional<std::uint64_t> seed;
  int restarts = 0;
  int max_iters = 2000;
  unsigned threads = 1;
  std::optional<double> tol;
  double rank_tol = numerics::kDefaultRankTol;
  bool with_oracle = false;
  std::size_t max_dim = kDefaultMaxTensorDim;
  std::optional<int> m_override;
  std::optional<std::string> n_override;
  // sweep
  double s_from = 0.0;
  double s_to = 1.0;
  double s_step = 0.1;
  std::vector<double> priors{0.5, 0.5};
  // rand
  std::size_t n_states = 2;
  std::size_t dim = 2;
};

namespace detail {

inline std::uint64_t resolve_seed(const RunConfig& c) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::InvalidInput, std::string(kSeedEnv) + " must be an unsigned integer");
  }
  return 0;
}

inline std::string read_input(const RunConfig& c, std::istream& in) {
  if (c.input_path.empty()) {
    throw Error(ErrorKind::InvalidInput, "--input is required for '" + c.command + "'");
  }
  if (c.input_path == "-") {
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }
  return io::read_file(c.input_path);
}

inline io::TaskSpec read_task(const RunConfig& c, std::istream& in) {
  io::TaskSpec t = io::task_from_json(io::parse_json_text(read_input(c, in)));
  if (c.m_override) t.m_copies = *c.m_override;
  if (c.n_override) {
    if (*c.n_override == "inf") {
      t.n_copies = CopyCount::infinite();
    } else {
      try {
        t.n_copies = CopyCount::finite(std::stoi(*c.n_override));
      } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidTask, "N must be an integer or \"inf\"");
      }
    }
  }
  return t;
}

inline BoundOptions bound_options(const RunConfig& c) {
  BoundOptions o;
  o.rank_tol = c.rank_tol;
  if (c.tol) o.feasibility_tol = *c.tol;
  return o;
}

inline oracle::OracleOptions oracle_options(const RunConfig& c, std::size_t n) {
  oracle::OracleOptions o;
  o.restarts = c.restarts > 0 ? c.restarts : oracle::default_restarts(n);
  o.seed = resolve_seed(c);
  o.max_iters = c.max_iters;
  o.threads = c.threads;
  return o;
}

inline std::string render(const io::json& report, Format format) {
  if (format == Format::Text) return io::to_text(report);
  return report.dump(2) + "\n";
}

inline const char* kInfeasibleWarning =
    "warning: no sign pattern satisfies the diagonal positivity condition; "
    "reporting the largest trace norm over all patterns\n";

inline oracle::OracleResult run_oracle(const CloneTask& task, const BoundReport& bound,
                                       const RunConfig& c) {
  const FidelityProblem problem{bound.a_tilde, bound.b_mat, bound.priors,
                                bound.rank_inputs, bound.rank_targets};
  return oracle::maximize_fidelity(problem, bound.v_opt,
                                   oracle_options(c, task.family.size()));
}

inline io::json oracle_block(const oracle::OracleResult& r, std::uint64_t seed) {
  io::json j = io::to_json(r);
  j["seed"] = seed;
  return j;
}

inline std::string cmd_bound(const RunConfig& c, std::istream& in, std::ostream& err) {
  const io::TaskSpec spec = read_task(c, in);
  const CloneTask task = spec.clone_task();
  if (task.n_copies.is_infinite()) {
    throw Error(ErrorKind::InvalidTask, "N = \"inf\" is the estimation limit; use 'estimate'");
  }
  const BoundOptions options = bound_options(c);
  const BoundReport report = clone_bound(make_clone_problem(task, options), options);
  if (!report.feasible) err << kInfeasibleWarning;
  io::json j = io::to_json(report);
  j["M"] = task.m_copies;
  j["N"] = task.n_copies.value();
  if (c.with_oracle) j["oracle"] = oracle_block(run_oracle(task, report, c), resolve_seed(c));
  return render(j, c.format);
}

inline std::string cmd_estimate(const RunConfig& c, std::istream& in, std::ostream& err) {
  const io::TaskSpec spec = read_task(c, in);
  if (spec.n_copies && !spec.n_copies->is_infinite()) {
    throw Error(ErrorKind::InvalidTask, "estimate needs N = \"inf\" or no N at all");
  }
  const int m = spec.m_copies.value_or(1);
  const EstimationReport report = estimation_bound(spec.family, m, bound_options(c));
  if (!report.feasible) err << kInfeasibleWarning;
  io::json j = io::to_json(report);
  j["M"] = m;
  j["N"] = "inf";
  return render(j, c.format);
}

inline std::string cmd_oracle(const RunConfig& c, std::istream& in, std::ostream& err) {
  const io::TaskSpec spec = read_task(c, in);
  const CloneTask task = spec.clone_task();
  if (task.n_copies.is_infinite()) {
    throw Error(ErrorKind::InvalidTask, "oracle needs a finite N");
  }
  const BoundOptions options = bound_options(c);
  const BoundReport bound = clone_bound(make_clone_problem(task, options), options);
  if (!bound.feasible) err << kInfeasibleWarning;
  const auto result = run_oracle(task, bound, c);
  io::json j = oracle_block(result, resolve_seed(c));
  j["fidelity_lower_bound"] = bound.fidelity_lower_bound;
  j["fprime_opt"] = bound.fprime_opt;
  j["M"] = task.m_copies;
  j["N"] = task.n_copies.value();
  return render(j, c.format);
}

inline std::vector<double> sweep_grid(double from, double to, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorKind::BadRange, "sweep step must be positive");
  }
  if (!(from >= 0.0 && to <= 1.0 && from <= to)) {
    throw Error(ErrorKind::BadRange, "sweep range must satisfy 0 <= from <= to <= 1");
  }
  const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) grid[k] = std::min(from + step * static_cast<double>(k), to);
  return grid;
}

inline std::string cmd_sweep(const RunConfig& c) {
  const int m = c.m_override.value_or(1);
  int n = 2;
  if (c.n_override) {
    try {
      n = std::stoi(*c.n_override);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidTask, "sweep needs a finite integer N");
    }
  }
  if (m < 1 || n < m) throw Error(ErrorKind::InvalidTask, "sweep needs 1 <= M <= N");
  const auto grid = sweep_grid(c.s_from, c.s_to, c.s_step);
  const bool equal_priors = c.priors.size() == 2 && c.priors[0] == c.priors[1];

  std::ostringstream out;
  out << "s,fprime_opt,fidelity_lower_bound";
  if (c.with_oracle) out << ",oracle_fidelity";
  if (equal_priors) out << ",closed_form";
  out << '\n';
  for (const double s : grid) {
    const CloneTask task{two_state_family(s, c.priors), m, CopyCount::finite(n)};
    const BoundOptions options = bound_options(c);
    const BoundReport bound = clone_bound(make_clone_problem(task, options), options);
    out << io::format_number(s, 17) << ',' << io::format_number(bound.fprime_opt, 17) << ','
        << io::format_number(bound.fidelity_lower_bound, 17);
    if (c.with_oracle) {
      out << ',' << io::format_number(run_oracle(task, bound, c).f_opt_numeric, 17);
    }
    if (equal_priors) {
      out << ',' << io::format_number(oracle::two_state_closed_form(s, m, n).fidelity, 17);
    }
    out << '\n';
  }
  return out.str();
}

inline double check_threshold(const RunConfig& c) { return c.tol.value_or(1e-10); }

inline std::string cmd_check(const RunConfig& c, std::istream& in, double& deviation) {
  const io::TaskSpec spec = read_task(c, in);
  if (!spec.family.has_vectors()) {
    throw Error(ErrorKind::NoVectors, "vectors required for 'check'");
  }
  const int m = spec.m_copies.value_or(1);
  deviation = tensor_power_check(spec.family, m, c.max_dim);
  io::json j{{"M", m},
             {"max_deviation", deviation},
             {"threshold", check_threshold(c)},
             {"passed", deviation <= check_threshold(c)}};
  return render(j, c.format);
}

inline std::string cmd_rand(const RunConfig& c) {
  const PureStateFamily f = random_family(resolve_seed(c), c.n_states, c.dim);
  io::json j = io::to_json(f);
  if (c.m_override) j["M"] = *c.m_override;
  if (c.n_override) {
    if (*c.n_override == "inf") {
      j["N"] = "inf";
    } else {
      j["N"] = std::stoi(*c.n_override);
    }
  }
  return j.dump(2) + "\n";
}

inline void add_common(CLI::App& sub, RunConfig& c, bool needs_input) {
  auto* input = sub.add_option("--input,-i", c.input_path, "Task/family JSON file ('-' for stdin)");
  if (needs_input) input->required();
  sub.add_option("--output,-o", c.output_path, "Write the report here instead of stdout");
  sub.add_option("--seed", c.seed, "Random seed (fallback: $CLONEBOUND_SEED, then 0)");
  sub.add_option("--tol", c.tol,
                 "Feasibility tolerance (bound/estimate/oracle, default 1e-9) or "
                 "deviation threshold (check, default 1e-10)");
  sub.add_option("--rank-tol", c.rank_tol, "Relative rank tolerance for Gram factorization")
      ->check(CLI::PositiveNumber);
  sub.add_option("-M", c.m_override, "Number of input copies (overrides the file)");
  sub.add_option("-N", c.n_override, "Number of output copies or 'inf' (overrides the file)");
}

inline void add_oracle_knobs(CLI::App& sub, RunConfig& c) {
  sub.add_option("--restarts", c.restarts, "Oracle restarts (0: 50 for n <= 3, else 200)")
      ->check(CLI::NonNegativeNumber);
  sub.add_option("--max-iters", c.max_iters, "Oracle iterations per restart")
      ->check(CLI::PositiveNumber);
  sub.add_option("--threads", c.threads, "Threads for oracle restarts")
      ->check(CLI::PositiveNumber);
}

inline void add_format(CLI::App& sub, RunConfig& c) {
  sub.add_option("--format", c.format, "Output format")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Format>{{"json", Format::Json}, {"text", Format::Text}},
          CLI::ignore_case))
      ->option_text("json|text");
}

}  // namespace detail

/// Runs the CLI on argv; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
               std::istream& in = std::cin) {
  RunConfig c;
  CLI::App app{"Fidelity lower bounds for deterministic state-dependent cloning"};
  app.require_subcommand(1, 1);

  auto* bound = app.add_subcommand("bound", "Cloning fidelity lower bound for a task");
  detail::add_common(*bound, c, true);
  detail::add_format(*bound, c);
  detail::add_oracle_knobs(*bound, c);
  bound->add_flag("--oracle", c.with_oracle, "Also run the brute-force oracle");

  auto* estimate = app.add_subcommand("estimate", "State-estimation probability lower bound");
  detail::add_common(*estimate, c, true);
  detail::add_format(*estimate, c);

  auto* orc = app.add_subcommand("oracle", "Maximize the global fidelity numerically");
  detail::add_common(*orc, c, true);
  detail::add_format(*orc, c);
  detail::add_oracle_knobs(*orc, c);

  auto* sweep = app.add_subcommand("sweep", "Two-state overlap sweep as CSV");
  detail::add_common(*sweep, c, false);
  detail::add_oracle_knobs(*sweep, c);
  sweep->add_option("--from", c.s_from, "First overlap");
  sweep->add_option("--to", c.s_to, "Last overlap");
  sweep->add_option("--step", c.s_step, "Overlap step");
  sweep->add_option("--priors", c.priors, "Two priors, comma separated")
      ->delimiter(',')
      ->expected(2);
  sweep->add_flag("--oracle", c.with_oracle, "Add the oracle_fidelity column");

  auto* check = app.add_subcommand("check", "Verify the tensor-power Gram identity");
  detail::add_common(*check, c, true);
  detail::add_format(*check, c);
  check->add_option("--max-dim", c.max_dim, "Cap on d^M")->check(CLI::PositiveNumber);

  auto* rnd = app.add_subcommand("rand", "Emit a random family as JSON");
  detail::add_common(*rnd, c, false);
  rnd->add_option("--n", c.n_states, "Number of states")->check(CLI::PositiveNumber);
  rnd->add_option("--d", c.dim, "Hilbert-space dimension")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  c.command = app.get_subcommands().front()->get_name();

  try {
    std::string text;
    int code = kExitOk;
    if (c.command == "bound") {
      text = detail::cmd_bound(c, in, err);
    } else if (c.command == "estimate") {
      text = detail::cmd_estimate(c, in, err);
    } else if (c.command == "oracle") {
      text = detail::cmd_oracle(c, in, err);
    } else if (c.command == "sweep") {
      text = detail::cmd_sweep(c);
    } else if (c.command == "check") {
      double deviation = 0.0;
      text = detail::cmd_check(c, in, deviation);
      if (!(deviation <= detail::check_threshold(c))) {
        err << "error: tensor-power deviation " << deviation << " exceeds threshold\n";
        code = kExitNumerical;
      }
    } else {
      text = detail::cmd_rand(c);
    }
    if (c.output_path.empty()) {
      out << text;
    } else {
      std::ofstream file(c.output_path, std::ios::binary);
      if (!file) throw Error(ErrorKind::InvalidInput, "cannot write " + c.output_path);
      file << text;
    }
    return code;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return e.is_numerical() ? kExitNumerical : kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               std::istream& in = std::cin) {
  std::vector<const char*> argv{"clonebound"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err, in);
}

}  // namespace clonebound::cli
