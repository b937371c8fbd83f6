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

#include <cmath>
#include <limits>

#include "chromabrush/colorpipe.hpp"
#include "chromabrush/error.hpp"

namespace chromabrush {

namespace {

CompareRun execute(char panel, optim::Method method, double decay, double lr, RunConfig config,
                   const NetworkBundle& network, const ImageBuffer& content,
                   const LossTargets& targets) {
  config.optimizer = method;
  config.decay_per_iter = decay;
  if (method == optim::Method::kSgd) config.sgd_lr = lr;
  CompareRun run{panel, method, decay, method == optim::Method::kSgd ? lr : 0.0, {}};
  try {
    run.result = colorize(config, network, content, targets);
  } catch (const Error& e) {
    run.result.canvas = initialize_canvas(config, content);
    run.result.failed = true;
    run.result.failure = e.what();
    run.result.final_loss = std::numeric_limits<double>::infinity();
  }
  return run;
}

}  // namespace

std::vector<double> sgd_lr_grid(double sgd_lr) {
  return {sgd_lr * 1e-2, sgd_lr * 1e-1, sgd_lr, sgd_lr * 1e1, sgd_lr * 1e2};
}

CompareResult compare_optimizers(const RunConfig& config, const NetworkBundle& network,
                                 const ImageBuffer& content, const ImageBuffer& style) {
  config.validate();
  const LossTargets targets = prepare_targets(content, style, network);
  const double decay = config.decay_per_iter;

  CompareResult out;
  const auto run_sgd_panel = [&](char panel, double panel_decay) {
    const std::size_t first = out.runs.size();
    std::size_t best = first;
    double best_loss = std::numeric_limits<double>::infinity();
    for (double lr : sgd_lr_grid(config.sgd_lr)) {
      out.runs.push_back(execute(panel, optim::Method::kSgd, panel_decay, lr, config, network,
                                 content, targets));
      const double loss = out.runs.back().result.final_loss;
      if (loss < best_loss) {
        best_loss = loss;
        best = out.runs.size() - 1;
      }
    }
    out.panels[panel] = best;
  };
  const auto run_lbfgs_panel = [&](char panel, double panel_decay) {
    out.runs.push_back(execute(panel, optim::Method::kLbfgs, panel_decay, 0.0, config, network,
                               content, targets));
    out.panels[panel] = out.runs.size() - 1;
  };

  run_sgd_panel('a', 0.0);
  run_sgd_panel('b', decay);
  run_lbfgs_panel('c', 0.0);
  run_lbfgs_panel('d', decay);
  return out;
}

CompareResult compare_optimizers(const RunConfig& config, const NetworkBundle& network) {
  config.validate();
  const ImageBuffer content =
      preprocess(config.content_path, config.max_side, config.grayscale_content, Provenance::kContent);
  const ImageBuffer style = preprocess(config.style_path, config.max_side, false, Provenance::kStyle);
  CompareResult result = compare_optimizers(config, network, content, style);
  for (const auto& [panel, index] : result.panels) {
    write_png(panel_path_for(config.output_path, panel), deprocess(result.runs[index].result.canvas));
  }
  write_compare_csv(compare_trace_path_for(config.output_path), result);
  return result;
}

}  // namespace chromabrush
