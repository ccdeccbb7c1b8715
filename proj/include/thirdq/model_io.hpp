#pragma once

#include <optional>
#include <string>

#include "thirdq/model.hpp"

namespace thirdq {

class ModelFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedModel {
  QuadraticModel model;
  std::optional<HPFrame> frame;
};

/* JSON model files. Complex entries are [re, im] pairs:
 * {
 *   "n": 2,
 *   "H": [[[0,0],[1,0]],[[1,0],[0,0]]],
 *   "K": ...,
 *   "baths": [{"l": [[1,0],[0,0]], "k": [[0,0],[0,0]]}, ...],
 *   "hp": {"S": 1000, "orientations": ["up", "down"]}   // optional
 * }
 */
LoadedModel load_model_file(const std::string& path);
void save_model_file(const std::string& path, const QuadraticModel& model,
                     const std::optional<HPFrame>& frame = {});

}  // namespace thirdq
