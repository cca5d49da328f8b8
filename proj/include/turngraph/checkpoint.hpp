#pragma once

#include <iosfwd>
#include <string>

#include "turngraph/model.hpp"

namespace turngraph {

// Text format, one tensor block per parameter, values as C hexfloats so
// save -> load reproduces every double bitwise. Layout:
//   turngraph checkpoint v1
//   config <line count>  / embedded canonical config
//   classes <C>          / one "class <name>" line each
//   vocab <total size>   / one "token <tok>" line per open-vocabulary entry
//   tensor <name> <rows> <cols> / one line of hexfloats per row
//   end
void save_checkpoint(const Model& model, std::ostream& out);
void save_checkpoint_file(const Model& model, const std::string& path);

// Strict parse; any deviation raises MALFORMED_CHECKPOINT.
Model load_checkpoint(std::istream& in);
Model load_checkpoint_file(const std::string& path);

}  // namespace turngraph
