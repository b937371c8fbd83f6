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

#include <atomic>
#include <cstdlib>
#include <string>

#include "chromabrush/error.hpp"
#include "kernels_internal.hpp"

namespace chromabrush::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* lookup(Backend backend) noexcept {
  switch (backend) {
    case Backend::kScalar:
      return &detail::scalar_table();
    case Backend::kAvx2:
      return cpu_has_avx2() ? detail::avx2_table() : nullptr;
    case Backend::kNeon:
      return detail::neon_table();
  }
  return nullptr;
}

const KernelTable* initial_table() noexcept {
  if (const char* forced = std::getenv("CHROMABRUSH_KERNELS")) {
    const std::string name(forced);
    for (Backend b : {Backend::kScalar, Backend::kAvx2, Backend::kNeon}) {
      if (name == backend_name(b)) {
        if (const KernelTable* t = lookup(b)) return t;
      }
    }
  }
  if (const KernelTable* t = lookup(Backend::kAvx2)) return t;
  if (const KernelTable* t = lookup(Backend::kNeon)) return t;
  return &detail::scalar_table();
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

bool supported(Backend backend) noexcept { return lookup(backend) != nullptr; }

const KernelTable& table(Backend backend) {
  const KernelTable* t = lookup(backend);
  if (t == nullptr) {
    throw ConfigError("kernel backend '" + std::string(backend_name(backend)) +
                      "' is not available on this machine");
  }
  return *t;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(Backend backend) { current().store(&table(backend), std::memory_order_release); }

std::string_view backend_name(Backend backend) noexcept {
  switch (backend) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "unknown";
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::kScalar, Backend::kAvx2, Backend::kNeon}) {
    if (supported(b)) out.push_back(b);
  }
  return out;
}

ScopedBackend::ScopedBackend(Backend backend) : previous_(active().backend) { select(backend); }

ScopedBackend::~ScopedBackend() { select(previous_); }

}  // namespace chromabrush::kernels
