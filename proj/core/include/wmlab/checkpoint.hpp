// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wmlab/tensor.hpp"

namespace wmlab {

// Parameter checkpoints: a text manifest (one line per tensor: name, rows,
// cols, byte offset) followed by flat little-endian binary data.  The
// default payload is 32-bit reals; f64 is used for exact-resume training
// state.
enum class CheckpointDtype { f32, f64 };

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

void save_checkpoint(const std::string& path,
                     const std::vector<NamedTensor>& tensors,
                     CheckpointDtype dtype = CheckpointDtype::f32);

// Returns tensors in manifest order; all are plain leaves (no grad).
std::vector<NamedTensor> load_checkpoint(const std::string& path);

// True if the file starts with the checkpoint manifest magic.
bool is_checkpoint_file(const std::string& path);

}  // namespace wmlab
