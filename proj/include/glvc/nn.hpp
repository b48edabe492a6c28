// Copyright (c) 2026 the glvc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "glvc/autograd.hpp"
#include "glvc/rng.hpp"
#include "glvc/tensor.hpp"

namespace glvc {

struct Parameter {
  std::string name;
  Value value;       // needs_grad tracks !frozen
  Tensor adam_m;
  Tensor adam_v;
  int64_t step_count = 0;
  bool frozen = false;

  void set_frozen(bool f) {
    frozen = f;
    value->needs_grad = !f;
  }
};

using ParamPtr = std::shared_ptr<Parameter>;

class ParameterStore {
 public:
  // uniform init in +-sqrt(1/fan_in); fan_in = 0 means zero init
  ParamPtr create(const std::string& name, Shape shape, int fan_in, Rng& rng);
  ParamPtr create_const(const std::string& name, Shape shape, double value);

  ParamPtr get(const std::string& name) const;
  bool has(const std::string& name) const;
  const std::vector<ParamPtr>& all() const { return params_; }

  void zero_grads();
  void freeze_all(bool frozen);
  // freeze/unfreeze every parameter whose name starts with prefix
  void set_frozen_prefix(const std::string& prefix, bool frozen);

  // FNV-1a over raw value bytes of parameters NOT matching prefix (empty
  // prefix = all parameters). Used by freeze-contract tests.
  uint64_t checksum_excluding(const std::string& prefix) const;

  int64_t total_values() const;

  // "GLVP" checkpoint: magic, version byte, then per-parameter records
  // (u32 name length, name bytes, u32 rank, u32 extents, raw f64 LE values).
  void save(const std::string& path) const;
  void load(const std::string& path);

 private:
  std::vector<ParamPtr> params_;
  std::unordered_map<std::string, size_t> index_;
};

// Bias-corrected Adam. Parameters with absent gradients are treated as
// zero-gradient; frozen parameters are untouched (no state decay, no count).
struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void adam_step(ParameterStore& store, const AdamConfig& cfg);

// -- layers -------------------------------------------------------------

struct Conv2d {
  ParamPtr w, b;
  int stride = 1, pad = 1;

  Conv2d() = default;
  Conv2d(ParameterStore& store, const std::string& name, int cin, int cout,
         int k, int stride, int pad, Rng& rng);
  Value operator()(Tape& t, const Value& x) const;
};

struct ConvT2d {
  ParamPtr w, b;
  int stride = 2, pad = 1;

  ConvT2d() = default;
  ConvT2d(ParameterStore& store, const std::string& name, int cin, int cout,
          int k, int stride, int pad, Rng& rng);
  Value operator()(Tape& t, const Value& x) const;
};

}  // namespace glvc
