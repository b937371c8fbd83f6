// Copyright 2026 The Chromabrush Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "chromabrush/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "chromabrush/kernels.hpp"

namespace chromabrush::cli {
namespace {

const std::map<std::string, optim::Method> kOptimizers{{"lbfgs", optim::Method::kLbfgs},
                                                       {"sgd", optim::Method::kSgd}};
const std::map<std::string, PoolMode> kPoolings{{"avg", PoolMode::kAvg}, {"max", PoolMode::kMax}};
const std::map<std::string, InitMode> kInits{{"noise", InitMode::kNoise},
                                             {"content", InitMode::kContent}};

template <typename Enum>
std::string name_of(const std::map<std::string, Enum>& table, Enum value) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Flag targets for one run-style subcommand.
struct RunFlags {
  std::string content, style, out, weights;
  std::size_t iterations = 1000;
  double alpha = 1.0;
  double beta = 0.0;
  double decay = 0.0025;
  std::string optimizer = "lbfgs";
  std::string pooling = "avg";
  std::string init = "noise";
  std::uint64_t seed = 0;
  std::size_t max_side = 512;
  double sgd_lr = 1.0;
  double sgd_momentum = 0.9;
  std::size_t history_reset = 0;
  double noise_std = 30.0;
  bool keep_color = false;
  bool dry_run = false;
  CLI::Option* beta_opt = nullptr;
};

void add_run_flags(CLI::App& sub, RunFlags& f) {
  sub.add_option("--content", f.content, "Grayscale content image (PNG/JPEG)")->required();
  sub.add_option("--style", f.style, "Color style image (PNG/JPEG)")->required();
  sub.add_option("--out", f.out, "Output PNG path")->required();
  sub.add_option("--weights", f.weights, "VGGW weight file (default: $CHROMABRUSH_WEIGHTS)");
  sub.add_option("--iters", f.iterations, "Optimizer iterations")->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
  sub.add_option("--alpha", f.alpha, "Content weight")->capture_default_str();
  f.beta_opt = sub.add_option("--beta", f.beta, "Initial style weight (default: 1000 * alpha)");
  sub.add_option("--decay", f.decay, "Per-iteration style weight decay")->capture_default_str();
  sub.add_option("--optimizer", f.optimizer, "lbfgs or sgd")
      ->check(CLI::IsMember({"lbfgs", "sgd"}))->capture_default_str();
  sub.add_option("--pooling", f.pooling, "avg or max")
      ->check(CLI::IsMember({"avg", "max"}))->capture_default_str();
  sub.add_option("--init", f.init, "noise or content")
      ->check(CLI::IsMember({"noise", "content"}))->capture_default_str();
  sub.add_option("--seed", f.seed, "Noise seed")->capture_default_str();
  sub.add_option("--max-side", f.max_side, "Longest image side after downscaling")
      ->capture_default_str();
  sub.add_option("--sgd-lr", f.sgd_lr, "SGD learning rate")->capture_default_str();
  sub.add_option("--sgd-momentum", f.sgd_momentum, "SGD momentum")->capture_default_str();
  sub.add_option("--history-reset", f.history_reset,
                 "Clear L-BFGS history every K iterations (0: never)")->capture_default_str();
  sub.add_option("--noise-std", f.noise_std, "Noise init std (preprocessed units)")
      ->capture_default_str();
  sub.add_flag("--keep-color", f.keep_color, "Do not convert the content image to grayscale");
  sub.add_flag("--dry-run", f.dry_run, "Print the run header and exit");
}

RunConfig to_config(const RunFlags& f) {
  RunConfig c;
  c.content_path = f.content;
  c.style_path = f.style;
  c.output_path = f.out;
  c.iterations = f.iterations;
  c.alpha = f.alpha;
  if (f.beta_opt->count() > 0) c.beta0 = f.beta;
  c.decay_per_iter = f.decay;
  c.optimizer = kOptimizers.at(f.optimizer);
  c.pooling = kPoolings.at(f.pooling);
  c.init = kInits.at(f.init);
  c.seed = f.seed;
  c.max_side = f.max_side;
  c.sgd_lr = f.sgd_lr;
  c.sgd_momentum = f.sgd_momentum;
  c.history_reset_every = f.history_reset;
  c.grayscale_content = !f.keep_color;
  c.noise_std = f.noise_std;
  return c;
}

std::optional<std::filesystem::path> weights_from(const std::string& flag) {
  if (!flag.empty()) return std::filesystem::path(flag);
  if (const char* env = std::getenv(kWeightsEnv); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  return std::nullopt;
}

NetworkBundle load_vgg19(const std::filesystem::path& weights, PoolMode pooling) {
  NetworkBundle bundle;
  bundle.topology = vgg19_topology(pooling);
  bundle.weights = load_weights(weights, bundle.topology);
  bundle.layers = LayerSelection::vgg19_default();
  return bundle;
}

void print_progress(std::ostream& err, const TraceRow& r, std::size_t total) {
  err << "iter " << (r.iter + 1) << "/" << total << "  beta " << g9(r.beta) << "  total "
      << g9(r.total) << "  content " << g9(r.content) << "  style " << g9(r.style) << "  |grad| "
      << g9(r.grad_norm) << '\n';
}

int run_colorize(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  const RunConfig& config = inv.config;
  const NetworkBundle network = load_vgg19(*inv.weights_path, config.pooling);
  ProgressCallback progress;
  if (inv.verbosity > 0) {
    progress = [&](const TraceRow& r) {
      if ((r.iter + 1) % kProgressEvery == 0 || r.iter + 1 == config.iterations) {
        print_progress(err, r, config.iterations);
      }
    };
  }
  const RunResult result = run_colorization(config, network, progress);
  out << "wrote " << config.output_path.string() << " and " << trace_path_for(config.output_path).string()
      << '\n';
  if (result.failed) {
    err << "error: optimization stopped early (" << result.failure
        << "); best-so-far image written\n";
    return kExitRuntimeFailure;
  }
  return kExitOk;
}

int run_compare(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  const RunConfig& config = inv.config;
  const NetworkBundle network = load_vgg19(*inv.weights_path, config.pooling);
  const CompareResult result = compare_optimizers(config, network);
  for (const CompareRun& run : result.runs) {
    if (inv.verbosity > 1 || run.result.failed) {
      err << "run " << run.panel << " lr " << g9(run.learning_rate) << ": final loss "
          << g9(run.result.final_loss) << (run.result.failed ? " (failed: " + run.result.failure + ")" : "")
          << '\n';
    }
  }
  for (const auto& [panel, index] : result.panels) {
    const CompareRun& run = result.runs[index];
    out << panel << ' ' << (run.optimizer == optim::Method::kSgd ? "sgd  " : "lbfgs")
        << " decay " << g9(run.decay);
    if (run.optimizer == optim::Method::kSgd) out << " lr " << g9(run.learning_rate);
    out << "  final loss " << g9(run.result.final_loss) << "  -> "
        << panel_path_for(config.output_path, panel).string() << '\n';
  }
  out << "trace: " << compare_trace_path_for(config.output_path).string() << '\n';
  return kExitOk;
}

}  // namespace

CliInvocation parse_args(const std::vector<std::string>& argv) {
  CLI::App app{"Grayscale image colorization by content/style feature optimization", "chromabrush"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  int verbose = 0;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "More output (repeatable)");
  app.add_flag("-q,--quiet", quiet, "No header or progress output");

  RunFlags colorize_flags, compare_flags;
  CLI::App* colorize = app.add_subcommand("colorize", "Colorize a grayscale image");
  add_run_flags(*colorize, colorize_flags);
  CLI::App* compare = app.add_subcommand("compare", "Run the {sgd, lbfgs} x {fixed, decaying} matrix");
  add_run_flags(*compare, compare_flags);
  std::string check_path;
  CLI::App* check = app.add_subcommand("check-weights", "Validate a VGGW weight file");
  check->add_option("--weights", check_path, "VGGW weight file (default: $CHROMABRUSH_WEIGHTS)");

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  const auto usage_for = [&]() {
    for (CLI::App* sub : {colorize, compare, check}) {
      if (sub->parsed()) return sub->help();
    }
    return app.help();
  };
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    throw UsageError("", usage_for());
  } catch (const CLI::CallForAllHelp&) {
    throw UsageError("", app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what(), usage_for());
  }

  CliInvocation inv;
  inv.verbosity = quiet ? 0 : 1 + verbose;
  if (check->parsed()) {
    inv.subcommand = Subcommand::kCheckWeights;
    inv.weights_path = weights_from(check_path);
    if (!inv.weights_path) {
      throw UsageError("--weights is required (or set " + std::string(kWeightsEnv) + ")", check->help());
    }
    return inv;
  }

  const bool is_compare = compare->parsed();
  const RunFlags& flags = is_compare ? compare_flags : colorize_flags;
  CLI::App* sub = is_compare ? compare : colorize;
  inv.subcommand = is_compare ? Subcommand::kCompare : Subcommand::kColorize;
  inv.config = to_config(flags);
  inv.dry_run = flags.dry_run;
  inv.weights_path = weights_from(flags.weights);
  try {
    inv.config.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what(), sub->help());
  }
  if (!inv.weights_path && !inv.dry_run) {
    throw UsageError("--weights is required (or set " + std::string(kWeightsEnv) + ")", sub->help());
  }
  return inv;
}

std::string run_header(const CliInvocation& inv, const LayerSelection& layers) {
  const RunConfig& c = inv.config;
  std::ostringstream os;
  os << "chromabrush " << (inv.subcommand == Subcommand::kCompare ? "compare" : "colorize") << '\n';
  const auto line = [&](const char* key, const std::string& value) {
    os << "  " << key << ": " << value << '\n';
  };
  line("content", c.content_path.string());
  line("style", c.style_path.string());
  line("out", c.output_path.string());
  line("weights", inv.weights_path ? inv.weights_path->string() : "(none)");
  line("iterations", std::to_string(c.iterations));
  line("alpha", g9(c.alpha));
  line("beta0", g9(c.effective_beta0()));
  line("decay", g9(c.decay_per_iter));
  line("optimizer", name_of(kOptimizers, c.optimizer));
  line("pooling", name_of(kPoolings, c.pooling));
  line("init", name_of(kInits, c.init));
  line("seed", std::to_string(c.seed));
  line("max_side", std::to_string(c.max_side));
  line("sgd_lr", g9(c.sgd_lr));
  line("sgd_momentum", g9(c.sgd_momentum));
  line("history_reset", std::to_string(c.history_reset_every));
  line("noise_std", g9(c.noise_std));
  line("grayscale_content", c.grayscale_content ? "yes" : "no");
  line("content_layer", layers.content_layer);
  std::string styles;
  for (const auto& [name, w] : layers.style_weights) {
    if (!styles.empty()) styles += ' ';
    styles += name + "=" + g9(w);
  }
  line("style_layers", styles);
  line("kernels", kernels::active().name);
  return os.str();
}

int run(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  try {
    if (inv.subcommand == Subcommand::kCheckWeights) {
      out << format_weight_report(check_weights(*inv.weights_path));
      return kExitOk;
    }
    if (inv.verbosity > 0 || inv.dry_run) err << run_header(inv, LayerSelection::vgg19_default());
    if (inv.dry_run) return kExitOk;
    return inv.subcommand == Subcommand::kCompare ? run_compare(inv, out, err)
                                                  : run_colorize(inv, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUserError;
  } catch (const SizeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUserError;
  } catch (const CaptureError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUserError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeFailure;
  }
}

int main_entry(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CliInvocation inv;
  try {
    inv = parse_args(argv);
  } catch (const UsageError& e) {
    if (std::string(e.what()).empty()) {
      out << e.usage();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << e.usage();
    return kExitUserError;
  }
  return run(inv, out, err);
}

}  // namespace chromabrush::cli
