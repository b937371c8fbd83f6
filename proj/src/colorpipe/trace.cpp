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

#include <cstdio>
#include <fstream>

#include "chromabrush/colorpipe.hpp"
#include "chromabrush/error.hpp"

namespace chromabrush {
namespace {

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("short write to '" + path.string() + "'");
}

void append_row(std::string& out, const TraceRow& r) {
  out += std::to_string(r.iter);
  for (double v : {r.beta, r.total, r.content, r.style, r.grad_norm, r.step}) {
    out += ',';
    out += g9(v);
  }
  out += '\n';
}

}  // namespace

std::filesystem::path trace_path_for(const std::filesystem::path& output) {
  std::filesystem::path p = output;
  return p.replace_extension(".csv");
}

std::string format_trace_csv(const std::vector<TraceRow>& trace) {
  std::string out = "iter,beta,total,content,style,grad_norm,step\n";
  for (const TraceRow& r : trace) append_row(out, r);
  return out;
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace) {
  write_text(path, format_trace_csv(trace));
}

std::filesystem::path panel_path_for(const std::filesystem::path& output, char panel) {
  std::filesystem::path p = output;
  const std::string ext = output.has_extension() ? output.extension().string() : ".png";
  p.replace_filename(output.stem().string() + "_" + panel + ext);
  return p;
}

std::filesystem::path compare_trace_path_for(const std::filesystem::path& output) {
  std::filesystem::path p = output;
  p.replace_filename(output.stem().string() + "_compare.csv");
  return p;
}

std::string format_compare_csv(const CompareResult& result) {
  std::string out = "panel,optimizer,decay,lr,selected,iter,beta,total,content,style,grad_norm,step\n";
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const CompareRun& run = result.runs[i];
    const bool selected = result.panels.count(run.panel) && result.panels.at(run.panel) == i;
    std::string prefix(1, run.panel);
    prefix += run.optimizer == optim::Method::kSgd ? ",sgd," : ",lbfgs,";
    prefix += g9(run.decay) + "," + g9(run.learning_rate) + "," + (selected ? "1," : "0,");
    for (const TraceRow& r : run.result.trace) {
      out += prefix;
      append_row(out, r);
    }
  }
  return out;
}

void write_compare_csv(const std::filesystem::path& path, const CompareResult& result) {
  write_text(path, format_compare_csv(result));
}

}  // namespace chromabrush
