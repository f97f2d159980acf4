#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace biaslearn {

// One labeled training set: (input, label) pairs.
using TrainingSet = std::vector<std::pair<Eigen::VectorXd, double>>;

// An (n, m)-sample: n training sets of m examples each, one per task.
struct NMSample {
  int n = 0;
  int m = 0;
  std::vector<TrainingSet> rows;
  std::vector<int> task_ids;  // provenance indices into the drawn task list

  int input_dim() const {
    return rows.empty() || rows.front().empty()
               ? 0
               : static_cast<int>(rows.front().front().first.size());
  }

  void validate() const;
};

// CSV with columns task_id, example_id, x_1..x_d, y.
std::string nmsample_to_csv(const NMSample& sample);

}  // namespace biaslearn
