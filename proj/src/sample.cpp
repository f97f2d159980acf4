#include "biaslearn/sample.hpp"

#include <sstream>
#include <stdexcept>

#include "biaslearn/format.hpp"

namespace biaslearn {

void NMSample::validate() const {
  if (n < 1 || m < 1) throw std::invalid_argument("n and m must be >= 1");
  if (static_cast<int>(rows.size()) != n)
    throw std::invalid_argument("sample must have n rows");
  const int d = input_dim();
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != m)
      throw std::invalid_argument("every row must have exactly m entries");
    for (const auto& [x, y] : row) {
      (void)y;
      if (static_cast<int>(x.size()) != d)
        throw std::invalid_argument("inconsistent input dimension in sample");
    }
  }
}

std::string nmsample_to_csv(const NMSample& sample) {
  sample.validate();
  std::ostringstream out;
  out << "task_id,example_id";
  for (int j = 1; j <= sample.input_dim(); ++j) out << ",x_" << j;
  out << ",y\n";
  for (int i = 0; i < sample.n; ++i)
    for (int j = 0; j < sample.m; ++j) {
      const auto& [x, y] = sample.rows[i][j];
      out << sample.task_ids[i] << ',' << j;
      for (Eigen::Index c = 0; c < x.size(); ++c)
        out << ',' << fmt_double(x(c));
      out << ',' << fmt_double(y) << '\n';
    }
  return out.str();
}

}  // namespace biaslearn
