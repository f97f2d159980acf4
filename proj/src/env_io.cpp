#include <map>
#include <sstream>
#include <stdexcept>

#include "biaslearn/env.hpp"
#include "biaslearn/format.hpp"

namespace biaslearn::env {
namespace {

const char* kHeader = "biaslearn-env v1";

void fail(const std::string& msg) {
  throw std::invalid_argument("env record: " + msg);
}

void write_matrix_row_major(std::ostream& out, const char* key,
                            const Eigen::MatrixXd& m) {
  out << key << " =";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ' ' << fmt_double(m(i, j));
  out << '\n';
}

std::string task_kind_name(Task::Kind k) {
  switch (k) {
    case Task::Kind::FiniteSupport: return "finite-support";
    case Task::Kind::BooleanBiased: return "boolean-biased";
    case Task::Kind::SharedFeatureGenerative: return "generative";
  }
  return "?";
}

// Simple "key = values..." reader over the record lines.
class Record {
 public:
  explicit Record(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      lines_.push_back(line);
    }
  }

  bool done() const { return pos_ >= lines_.size(); }
  const std::string& peek() const { return lines_[pos_]; }
  std::string next() { return lines_[pos_++]; }

  // Parses "key = v1 v2 ..."; fails on key mismatch.
  std::vector<std::string> expect(const std::string& key) {
    if (done()) fail("unexpected end of record, wanted '" + key + "'");
    std::istringstream ls(next());
    std::string k, eq;
    ls >> k >> eq;
    if (k != key || eq != "=")
      fail("expected '" + key + " = ...', got '" + lines_[pos_ - 1] + "'");
    std::vector<std::string> vals;
    std::string tok;
    while (ls >> tok) vals.push_back(tok);
    return vals;
  }

  double expect_double(const std::string& key) {
    auto v = expect(key);
    if (v.size() != 1) fail("'" + key + "' wants one value");
    return std::stod(v[0]);
  }
  long long expect_int(const std::string& key) {
    auto v = expect(key);
    if (v.size() != 1) fail("'" + key + "' wants one value");
    return std::stoll(v[0]);
  }

 private:
  std::vector<std::string> lines_;
  std::size_t pos_ = 0;
};


}  // namespace

std::string env_to_text(const Environment& e) {
  std::ostringstream out;
  out << kHeader << '\n';
  out << "seed_domain = " << e.seed_domain() << '\n';
  switch (e.kind()) {
    case Environment::Kind::SharedFeature: {
      const auto& fw = *e.shared_features();
      out << "kind = shared-feature\n";
      out << "head_bound = " << fmt_double(e.head_bound()) << '\n';
      out << "noise_std = " << fmt_double(e.noise_std()) << '\n';
      out << "d = " << fw.d() << '\n';
      out << "l = " << fw.l() << '\n';
      out << "k = " << fw.k() << '\n';
      out << "weight_bound = " << fmt_double(fw.weight_bound) << '\n';
      write_matrix_row_major(out, "u", fw.u);
      write_matrix_row_major(out, "v", fw.v);
      break;
    }
    case Environment::Kind::FiniteMixture: {
      out << "kind = finite-mixture\n";
      out << "input_dim = " << e.input_dim() << '\n';
      out << "tasks = " << e.mixture().size() << '\n';
      for (const auto& [task, weight] : e.mixture()) {
        if (task.kind() == Task::Kind::SharedFeatureGenerative)
          fail("generative tasks inside mixtures are not serializable");
        out << "[task]\n";
        out << "weight = " << fmt_double(weight) << '\n';
        out << "task_kind = " << task_kind_name(task.kind()) << '\n';
        out << "label_space = "
            << (task.label_space() == LabelSpace::UnitInterval ? "unit" : "sign")
            << '\n';
        out << "atoms = " << task.support().size() << '\n';
        for (const auto& a : task.support()) {
          out << "atom =";
          for (Eigen::Index c = 0; c < a.x.size(); ++c)
            out << ' ' << fmt_double(a.x(c));
          out << ' ' << fmt_double(a.y) << ' ' << fmt_double(a.p) << '\n';
        }
      }
      break;
    }
    case Environment::Kind::HardBoolean: {
      const auto& h = e.hard();
      out << "kind = hard-boolean\n";
      out << "beta = " << fmt_double(h.beta) << '\n';
      out << "sign_seed = " << h.sign_seed << '\n';
      out << "rows = " << h.points.size() << '\n';
      out << "cols = " << h.points.front().size() << '\n';
      out << "point_dim = " << h.points.front().front().size() << '\n';
      for (const auto& row : h.points) {
        out << "row =";
        for (const auto& p : row)
          for (Eigen::Index c = 0; c < p.size(); ++c)
            out << ' ' << fmt_double(p(c));
        out << '\n';
      }
      break;
    }
  }
  return out.str();
}

Environment env_from_text(const std::string& text) {
  Record rec(text);
  if (rec.done() || rec.next() != kHeader)
    fail(std::string("missing header '") + kHeader + "'");
  const auto seed_domain = static_cast<std::uint64_t>(rec.expect_int("seed_domain"));
  const auto kind = rec.expect("kind");
  if (kind.size() != 1) fail("bad kind line");

  if (kind[0] == "shared-feature") {
    const double head_bound = rec.expect_double("head_bound");
    const double noise_std = rec.expect_double("noise_std");
    const int d = static_cast<int>(rec.expect_int("d"));
    const int l = static_cast<int>(rec.expect_int("l"));
    const int k = static_cast<int>(rec.expect_int("k"));
    const double wb = rec.expect_double("weight_bound");
    auto fw = std::make_shared<net::FeatureWeights>();
    fw->weight_bound = wb;
    const auto uvals = rec.expect("u");
    const auto vvals = rec.expect("v");
    if (static_cast<int>(uvals.size()) != l * (d + 1)) fail("u has wrong size");
    if (static_cast<int>(vvals.size()) != k * (l + 1)) fail("v has wrong size");
    fw->u.resize(l, d + 1);
    fw->v.resize(k, l + 1);
    int pos = 0;
    for (int i = 0; i < l; ++i)
      for (int j = 0; j <= d; ++j) fw->u(i, j) = std::stod(uvals[pos++]);
    pos = 0;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j <= l; ++j) fw->v(i, j) = std::stod(vvals[pos++]);
    return Environment::shared_feature(std::move(fw), head_bound, noise_std,
                                       seed_domain);
  }

  if (kind[0] == "finite-mixture") {
    const int input_dim = static_cast<int>(rec.expect_int("input_dim"));
    const int ntasks = static_cast<int>(rec.expect_int("tasks"));
    std::vector<std::pair<Task, double>> mix;
    for (int t = 0; t < ntasks; ++t) {
      if (rec.done() || rec.next() != "[task]") fail("expected [task] block");
      const double weight = rec.expect_double("weight");
      const auto tk = rec.expect("task_kind");
      const auto ls = rec.expect("label_space");
      if (tk.size() != 1 || ls.size() != 1) fail("bad task header");
      const LabelSpace space =
          ls[0] == "unit" ? LabelSpace::UnitInterval : LabelSpace::Sign;
      const int natoms = static_cast<int>(rec.expect_int("atoms"));
      std::vector<SupportAtom> atoms;
      for (int a = 0; a < natoms; ++a) {
        const auto vals = rec.expect("atom");
        if (static_cast<int>(vals.size()) != input_dim + 2)
          fail("atom line has wrong arity");
        SupportAtom atom;
        atom.x.resize(input_dim);
        for (int c = 0; c < input_dim; ++c) atom.x(c) = std::stod(vals[c]);
        atom.y = std::stod(vals[input_dim]);
        atom.p = std::stod(vals[input_dim + 1]);
        atoms.push_back(std::move(atom));
      }
      Task task = tk[0] == "boolean-biased"
                      ? Task::boolean_biased(input_dim, std::move(atoms))
                      : Task::finite_support(input_dim, std::move(atoms), space);
      mix.emplace_back(std::move(task), weight);
    }
    return Environment::finite_mixture(std::move(mix), seed_domain);
  }

  if (kind[0] == "hard-boolean") {
    const double beta = rec.expect_double("beta");
    const auto sign_seed = static_cast<std::uint64_t>(rec.expect_int("sign_seed"));
    const int rows = static_cast<int>(rec.expect_int("rows"));
    const int cols = static_cast<int>(rec.expect_int("cols"));
    const int dim = static_cast<int>(rec.expect_int("point_dim"));
    std::vector<std::vector<Eigen::VectorXd>> pts;
    for (int i = 0; i < rows; ++i) {
      const auto vals = rec.expect("row");
      if (static_cast<int>(vals.size()) != cols * dim)
        fail("row line has wrong arity");
      std::vector<Eigen::VectorXd> row;
      for (int j = 0; j < cols; ++j) {
        Eigen::VectorXd p(dim);
        for (int c = 0; c < dim; ++c) p(c) = std::stod(vals[j * dim + c]);
        row.push_back(std::move(p));
      }
      pts.push_back(std::move(row));
    }
    return Environment::hard_boolean(make_hard_boolean_env(pts, beta, sign_seed),
                                     seed_domain);
  }

  fail("unknown environment kind '" + kind[0] + "'");
  throw std::logic_error("unreachable");
}

}  // namespace biaslearn::env
