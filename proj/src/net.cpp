#include "biaslearn/net.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace biaslearn::net {
namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

Eigen::MatrixXd with_ones_row(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out(x.rows() + 1, x.cols());
  out.topRows(x.rows()) = x;
  out.bottomRows(1).setOnes();
  return out;
}

Eigen::MatrixXd sigmoid_mat(const Eigen::MatrixXd& x) {
  return x.unaryExpr([](double v) { return sigmoid(v); });
}

}  // namespace

void FeatureWeights::validate() const {
  require(u.rows() >= 1 && u.cols() >= 2, "u must be l x (d+1)");
  require(v.rows() >= 1 && v.cols() == u.rows() + 1, "v must be k x (l+1)");
  require(weight_bound > 0.0, "weight bound must be positive");
}

void OutputHead::validate() const {
  require(alpha.size() >= 2, "head must have k+1 entries");
  require(head_bound > 0.0, "head bound must be positive");
}

int MultiTaskNet::param_count() const {
  return features.param_count() +
         n() * static_cast<int>(features.k() + 1);
}

void MultiTaskNet::validate() const {
  features.validate();
  require(!heads.empty(), "net needs at least one head");
  for (const auto& h : heads) {
    h.validate();
    require(h.k() == features.k(), "head width must match feature count");
  }
}

MultiTaskNet init_net(const Arch& arch, int n, double init_scale, SplitRng rng,
                      double weight_bound, double head_bound) {
  require(arch.d >= 1 && arch.l >= 1 && arch.k >= 1, "bad architecture");
  require(n >= 1, "need at least one task");
  MultiTaskNet net;
  net.features.u.resize(arch.l, arch.d + 1);
  net.features.v.resize(arch.k, arch.l + 1);
  net.features.weight_bound = weight_bound;
  SplitRng ur = rng.child(1);
  SplitRng vr = rng.child(2);
  for (int i = 0; i < arch.l; ++i)
    for (int j = 0; j <= arch.d; ++j)
      net.features.u(i, j) = ur.uniform(-init_scale, init_scale);
  for (int i = 0; i < arch.k; ++i)
    for (int j = 0; j <= arch.l; ++j)
      net.features.v(i, j) = vr.uniform(-init_scale, init_scale);
  for (int t = 0; t < n; ++t) {
    OutputHead head;
    head.alpha.resize(arch.k + 1);
    head.head_bound = head_bound;
    SplitRng hr = rng.child(100 + t);
    for (int j = 0; j <= arch.k; ++j)
      head.alpha(j) = hr.uniform(-init_scale, init_scale);
    net.heads.push_back(std::move(head));
  }
  return net;
}

Eigen::VectorXd feature_forward(const FeatureWeights& fw,
                                const Eigen::VectorXd& x) {
  require(x.size() == fw.d(), "input dimension mismatch");
  Eigen::VectorXd xa(fw.d() + 1);
  xa.head(fw.d()) = x;
  xa(fw.d()) = 1.0;
  const Eigen::VectorXd h = sigmoid_mat(fw.u * xa);
  Eigen::VectorXd ha(fw.l() + 1);
  ha.head(fw.l()) = h;
  ha(fw.l()) = 1.0;
  return sigmoid_mat(fw.v * ha);
}

double head_forward(const FeatureWeights& fw, const OutputHead& head,
                    const Eigen::VectorXd& x) {
  require(head.k() == fw.k(), "head width must match feature count");
  const Eigen::VectorXd phi = feature_forward(fw, x);
  return sigmoid(head.alpha.head(fw.k()).dot(phi) + head.alpha(fw.k()));
}

double net_forward(const MultiTaskNet& net, int task_index,
                   const Eigen::VectorXd& x) {
  require(task_index >= 0 && task_index < net.n(), "task index out of range");
  return head_forward(net.features, net.heads[task_index], x);
}

LossGrad loss_and_grad(const MultiTaskNet& net, const NMSample& sample) {
  net.validate();
  require(sample.n == net.n(), "sample task count must match head count");
  require(sample.n >= 1 && sample.m >= 1, "sample must be nonempty");
  const int d = net.features.d();
  const int l = net.features.l();
  const int k = net.features.k();
  const int n = sample.n;
  const int m = sample.m;
  const int wcount = net.features.param_count();

  LossGrad out;
  out.grad = Eigen::VectorXd::Zero(net.param_count());
  Eigen::MatrixXd du = Eigen::MatrixXd::Zero(l, d + 1);
  Eigen::MatrixXd dv = Eigen::MatrixXd::Zero(k, l + 1);

  double loss = 0.0;
  const double inv = 1.0 / (static_cast<double>(n) * m);
  for (int i = 0; i < n; ++i) {
    require(static_cast<int>(sample.rows[i].size()) == m, "ragged sample");
    Eigen::MatrixXd x(d, m);
    Eigen::RowVectorXd y(m);
    for (int j = 0; j < m; ++j) {
      require(sample.rows[i][j].first.size() == d, "input dimension mismatch");
      x.col(j) = sample.rows[i][j].first;
      y(j) = sample.rows[i][j].second;
    }
    const Eigen::MatrixXd xa = with_ones_row(x);            // (d+1) x m
    const Eigen::MatrixXd h = sigmoid_mat(net.features.u * xa);   // l x m
    const Eigen::MatrixXd ha = with_ones_row(h);             // (l+1) x m
    const Eigen::MatrixXd phi = sigmoid_mat(net.features.v * ha); // k x m
    const Eigen::MatrixXd phia = with_ones_row(phi);          // (k+1) x m
    const Eigen::VectorXd& alpha = net.heads[i].alpha;
    const Eigen::RowVectorXd o =
        (alpha.transpose() * phia).unaryExpr([](double z) { return sigmoid(z); });
    const Eigen::RowVectorXd r = o - y;
    loss += inv * r.squaredNorm();

    // dL/dc for the head pre-activation, already carrying the 1/(n m) factor.
    const Eigen::RowVectorXd dc =
        (2.0 * inv) * r.cwiseProduct(o).cwiseProduct(
                          (1.0 - o.array()).matrix());
    // Head gradient: only row i of the sample contributes.
    out.grad.segment(wcount + i * (k + 1), k + 1) += phia * dc.transpose();

    const Eigen::MatrixXd dphi = alpha.head(k) * dc;               // k x m
    const Eigen::MatrixXd db =
        dphi.cwiseProduct(phi).cwiseProduct((1.0 - phi.array()).matrix());
    dv += db * ha.transpose();
    const Eigen::MatrixXd dh =
        net.features.v.leftCols(l).transpose() * db;               // l x m
    const Eigen::MatrixXd da =
        dh.cwiseProduct(h).cwiseProduct((1.0 - h.array()).matrix());
    du += da * xa.transpose();
  }
  out.loss = loss;
  // u row-major, then v row-major.
  int pos = 0;
  for (int i = 0; i < l; ++i)
    for (int j = 0; j <= d; ++j) out.grad(pos++) = du(i, j);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j <= l; ++j) out.grad(pos++) = dv(i, j);
  return out;
}

LossGrad head_loss_and_grad(const FeatureWeights& fw, const OutputHead& head,
                            const TrainingSet& z) {
  require(!z.empty(), "training set must be nonempty");
  require(head.k() == fw.k(), "head width must match feature count");
  const int k = fw.k();
  const int m = static_cast<int>(z.size());
  LossGrad out;
  out.grad = Eigen::VectorXd::Zero(k + 1);
  const double inv = 1.0 / m;
  for (const auto& [x, y] : z) {
    const Eigen::VectorXd phi = feature_forward(fw, x);
    const double o = sigmoid(head.alpha.head(k).dot(phi) + head.alpha(k));
    const double r = o - y;
    out.loss += inv * r * r;
    const double dc = 2.0 * inv * r * o * (1.0 - o);
    out.grad.head(k) += dc * phi;
    out.grad(k) += dc;
  }
  return out;
}

double empirical_loss(const MultiTaskNet& net, const NMSample& sample) {
  net.validate();
  require(sample.n == net.n(), "sample task count must match head count");
  const int d = net.features.d();
  const int m = sample.m;
  double loss = 0.0;
  // Mirrors the batch arithmetic of loss_and_grad exactly so line-search
  // probes and gradient steps see bit-identical loss values.
  const double inv = 1.0 / (static_cast<double>(sample.n) * m);
  for (int i = 0; i < sample.n; ++i) {
    Eigen::MatrixXd x(d, m);
    Eigen::RowVectorXd y(m);
    for (int j = 0; j < m; ++j) {
      x.col(j) = sample.rows[i][j].first;
      y(j) = sample.rows[i][j].second;
    }
    const Eigen::MatrixXd xa = with_ones_row(x);
    const Eigen::MatrixXd h = sigmoid_mat(net.features.u * xa);
    const Eigen::MatrixXd ha = with_ones_row(h);
    const Eigen::MatrixXd phi = sigmoid_mat(net.features.v * ha);
    const Eigen::MatrixXd phia = with_ones_row(phi);
    const Eigen::RowVectorXd o =
        (net.heads[i].alpha.transpose() * phia)
            .unaryExpr([](double z) { return sigmoid(z); });
    loss += inv * (o - y).squaredNorm();
  }
  return loss;
}

MultiTaskNet clip_weights(MultiTaskNet net) {
  const double bw = net.features.weight_bound;
  net.features.u = net.features.u.cwiseMax(-bw).cwiseMin(bw);
  net.features.v = net.features.v.cwiseMax(-bw).cwiseMin(bw);
  for (auto& h : net.heads) h = clip_head(std::move(h));
  return net;
}

OutputHead clip_head(OutputHead head) {
  head.alpha = head.alpha.cwiseMax(-head.head_bound).cwiseMin(head.head_bound);
  return head;
}

Eigen::VectorXd flatten(const MultiTaskNet& net) {
  Eigen::VectorXd p(net.param_count());
  const int d = net.features.d(), l = net.features.l(), k = net.features.k();
  int pos = 0;
  for (int i = 0; i < l; ++i)
    for (int j = 0; j <= d; ++j) p(pos++) = net.features.u(i, j);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j <= l; ++j) p(pos++) = net.features.v(i, j);
  for (const auto& h : net.heads)
    for (int j = 0; j <= k; ++j) p(pos++) = h.alpha(j);
  return p;
}

MultiTaskNet unflatten(const Arch& arch, int n, const Eigen::VectorXd& params,
                       double weight_bound, double head_bound) {
  MultiTaskNet net;
  net.features.u.resize(arch.l, arch.d + 1);
  net.features.v.resize(arch.k, arch.l + 1);
  net.features.weight_bound = weight_bound;
  require(params.size() == net.features.param_count() + n * (arch.k + 1),
          "parameter vector has the wrong length");
  int pos = 0;
  for (int i = 0; i < arch.l; ++i)
    for (int j = 0; j <= arch.d; ++j) net.features.u(i, j) = params(pos++);
  for (int i = 0; i < arch.k; ++i)
    for (int j = 0; j <= arch.l; ++j) net.features.v(i, j) = params(pos++);
  for (int t = 0; t < n; ++t) {
    OutputHead h;
    h.alpha.resize(arch.k + 1);
    h.head_bound = head_bound;
    for (int j = 0; j <= arch.k; ++j) h.alpha(j) = params(pos++);
    net.heads.push_back(std::move(h));
  }
  return net;
}

std::string net_to_text(const MultiTaskNet& net) {
  net.validate();
  std::ostringstream out;
  char buf[64];
  out << "biaslearn-net v1\n";
  out << net.features.d() << ' ' << net.features.l() << ' '
      << net.features.k() << ' ' << net.n() << ' ';
  std::snprintf(buf, sizeof buf, "%.17g %.17g", net.features.weight_bound,
                net.heads.front().head_bound);
  out << buf << '\n';
  const Eigen::VectorXd p = flatten(net);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", p(i));
    out << buf << '\n';
  }
  return out.str();
}

MultiTaskNet net_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  if (header != "biaslearn-net v1")
    throw std::invalid_argument("unrecognized net format: " + header);
  Arch arch;
  int n = 0;
  double bw = 0.0, ba = 0.0;
  if (!(in >> arch.d >> arch.l >> arch.k >> n >> bw >> ba))
    throw std::invalid_argument("bad net architecture header");
  const int total = arch.l * (arch.d + 1) + arch.k * (arch.l + 1) +
                    n * (arch.k + 1);
  Eigen::VectorXd p(total);
  for (int i = 0; i < total; ++i)
    if (!(in >> p(i)))
      throw std::invalid_argument("net file truncated at parameter " +
                                  std::to_string(i));
  return unflatten(arch, n, p, bw, ba);
}

}  // namespace biaslearn::net
