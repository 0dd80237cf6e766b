// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include "nodemoe/simd/kernels.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

namespace nodemoe::simd {

// Defined in the per-ISA translation units; return nullptr when not built.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "unknown";
}

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{kernels_for(detect_backend())};
  return table;
}

}  // namespace

const KernelTable* kernels_for(Backend backend) {
  switch (backend) {
    case Backend::scalar: return &scalar_kernels();
    case Backend::avx2: return cpu_has_avx2() ? avx2_kernels() : nullptr;
    case Backend::neon: return neon_kernels();
  }
  return nullptr;
}

Backend detect_backend() {
  if (kernels_for(Backend::avx2) != nullptr) return Backend::avx2;
  if (kernels_for(Backend::neon) != nullptr) return Backend::neon;
  return Backend::scalar;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void set_backend(Backend backend) {
  const KernelTable* table = kernels_for(backend);
  if (table == nullptr) {
    throw std::invalid_argument("kernel backend not available: " +
                                std::string(backend_name(backend)));
  }
  current().store(table, std::memory_order_release);
}

}  // namespace nodemoe::simd
