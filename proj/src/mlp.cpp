#include "pinn/mlp.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

#include "pinn/io.hpp"
#include "pinn/random.hpp"

namespace pinn {

InputMap InputMap::identity(int n_in) {
  return InputMap{std::vector<double>(n_in, 1.0), std::vector<double>(n_in, 0.0)};
}

InputMap InputMap::to_unit_box(std::span<const double> lo, std::span<const double> hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument("box bounds differ in length");
  InputMap m;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(hi[i] > lo[i])) throw std::invalid_argument("degenerate input interval");
    const double s = 2.0 / (hi[i] - lo[i]);
    m.scale.push_back(s);
    m.shift.push_back(-1.0 - s * lo[i]);
  }
  return m;
}

std::size_t param_count_for(std::span<const int> dims) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    n += static_cast<std::size_t>(dims[l]) * dims[l + 1] + dims[l + 1];
  }
  return n;
}

Mlp Mlp::init(std::vector<int> layer_dims, std::uint64_t seed, InputMap input_map) {
  if (layer_dims.size() < 2) {
    throw std::invalid_argument("network needs at least an input and an output layer");
  }
  for (int d : layer_dims) {
    if (d < 1) throw std::invalid_argument("layer widths must be positive");
  }
  Mlp net;
  net.dims_ = std::move(layer_dims);
  net.seed_ = seed;
  net.set_input_map(input_map.scale.empty() ? InputMap::identity(net.n_in())
                                            : std::move(input_map));

  Engine eng = make_engine(seed, Stream::kInit);
  for (std::size_t l = 0; l + 1 < net.dims_.size(); ++l) {
    const int fan_in = net.dims_[l];
    const int fan_out = net.dims_[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    DenseLayer layer{RowMatrix(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) layer.weight(r, c) = bound * (2.0 * uniform01(eng) - 1.0);
    }
    net.layers_.push_back(std::move(layer));
  }
  return net;
}

void Mlp::set_input_map(InputMap map) {
  if (map.scale.size() != static_cast<std::size_t>(n_in()) ||
      map.shift.size() != static_cast<std::size_t>(n_in())) {
    throw std::invalid_argument("input map dimension does not match network input");
  }
  input_map_ = std::move(map);
}

std::size_t Mlp::param_count() const { return param_count_for(dims_); }

std::vector<double> Mlp::get_params() const {
  std::vector<double> theta;
  theta.reserve(param_count());
  for (const auto& layer : layers_) {
    theta.insert(theta.end(), layer.weight.data(), layer.weight.data() + layer.weight.size());
    theta.insert(theta.end(), layer.bias.data(), layer.bias.data() + layer.bias.size());
  }
  return theta;
}

void Mlp::set_params(std::span<const double> theta) {
  if (theta.size() != param_count()) {
    throw std::invalid_argument("parameter vector has length " + std::to_string(theta.size()) +
                                ", network expects " + std::to_string(param_count()));
  }
  const double* p = theta.data();
  for (auto& layer : layers_) {
    std::memcpy(layer.weight.data(), p, sizeof(double) * layer.weight.size());
    p += layer.weight.size();
    std::memcpy(layer.bias.data(), p, sizeof(double) * layer.bias.size());
    p += layer.bias.size();
  }
}

bool Mlp::in_sweep_family() const {
  const int n_hidden = hidden_layers();
  if (n_in() < 2 || n_in() > 3 || n_out() < 1 || n_out() > 2) return false;
  if (n_hidden < 3 || n_hidden > 7) return false;
  const int width = dims_[1];
  if (width % 10 != 0 || width < 20 || width > 60) return false;
  for (int l = 1; l <= n_hidden; ++l) {
    if (dims_[l] != width) return false;
  }
  return true;
}

std::vector<double> Mlp::forward(std::span<const double> point) const {
  if (point.size() != static_cast<std::size_t>(n_in())) {
    throw std::invalid_argument("forward: input has length " + std::to_string(point.size()) +
                                ", network expects " + std::to_string(n_in()));
  }
  std::vector<double> h(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) h[i] = input_map_.apply(static_cast<int>(i), point[i]);

  std::vector<double> z;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    const bool hidden = l + 1 < layers_.size();
    z.assign(layer.bias.size(), 0.0);
    for (Eigen::Index j = 0; j < layer.weight.rows(); ++j) {
      double s = layer.bias[j];
      for (Eigen::Index k = 0; k < layer.weight.cols(); ++k) s += layer.weight(j, k) * h[k];
      z[j] = hidden ? std::tanh(s) : s;
    }
    h.swap(z);
  }
  return h;
}

std::vector<Jet2> Mlp::forward_jet(std::span<const double> point) const {
  const int n = n_in();
  if (point.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("forward_jet: input has length " + std::to_string(point.size()) +
                                ", network expects " + std::to_string(n));
  }
  std::vector<Jet2> h;
  for (int i = 0; i < n; ++i) {
    Jet2 x = Jet2::constant(input_map_.apply(i, point[i]), n);
    x.d(i) = input_map_.scale[i];
    h.push_back(x);
  }

  std::vector<Jet2> z;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    const bool hidden = l + 1 < layers_.size();
    z.assign(layer.bias.size(), Jet2::constant(0.0, n));
    for (Eigen::Index j = 0; j < layer.weight.rows(); ++j) {
      // Linear layer: the value channel uses the same accumulation order as forward().
      Jet2 s = Jet2::constant(layer.bias[j], n);
      for (Eigen::Index k = 0; k < layer.weight.cols(); ++k) {
        const double w = layer.weight(j, k);
        s.value() += w * h[k].value();
        for (int i = 0; i < n; ++i) {
          s.d(i) += w * h[k].d(i);
          s.dd(i) += w * h[k].dd(i);
        }
      }
      z[j] = hidden ? tanh(s) : s;
    }
    h.swap(z);
  }
  return h;
}

std::vector<Var> register_parameters(GradTape& tape, const Mlp& net) {
  std::vector<Var> params;
  params.reserve(net.param_count());
  for (double p : net.get_params()) params.push_back(tape.parameter(p));
  return params;
}

std::vector<Var> forward_jet(const Mlp& net, GradTape& tape, std::span<const Var> params,
                             std::span<const double> point) {
  if (params.size() != net.param_count()) {
    throw std::invalid_argument("taped forward: parameter handle count mismatch");
  }
  if (point.size() != static_cast<std::size_t>(net.n_in()) || tape.n_in() != net.n_in()) {
    throw std::invalid_argument("taped forward: input dimension mismatch");
  }
  const auto& map = net.input_map();
  std::vector<Var> h;
  for (int i = 0; i < net.n_in(); ++i) {
    // x_hat = scale * x + shift, with x the i-th jet input.
    h.push_back(tape.shift(tape.scale(tape.input(point[i], i), map.scale[i]), map.shift[i]));
  }
  std::size_t p = 0;
  const auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto rows = layers[l].weight.rows();
    const auto cols = layers[l].weight.cols();
    const std::size_t bias_offset = p + static_cast<std::size_t>(rows * cols);
    std::vector<Var> z;
    for (Eigen::Index j = 0; j < rows; ++j) {
      Var s = params[bias_offset + j];
      for (Eigen::Index k = 0; k < cols; ++k) s = s + params[p + j * cols + k] * h[k];
      z.push_back(l + 1 < layers.size() ? tanh(s) : s);
    }
    p = bias_offset + rows;
    h.swap(z);
  }
  return h;
}

namespace {

constexpr char kMagic[8] = {'B', 'P', 'I', 'N', 'N', 'C', 'K', '1'};

class ByteWriter {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put(bits, 8);
  }
  void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> b) : b_(b) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() {
    const std::uint64_t bits = get(8);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  void expect_magic() {
    need(8);
    if (std::memcmp(b_.data() + pos_, kMagic, 8) != 0) {
      throw std::runtime_error("checkpoint: bad magic");
    }
    pos_ += 8;
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > b_.size()) throw std::runtime_error("checkpoint: truncated");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Mlp& net) {
  ByteWriter w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(static_cast<std::uint32_t>(net.layer_dims().size()));
  for (int d : net.layer_dims()) w.u32(static_cast<std::uint32_t>(d));
  w.u64(net.seed());
  for (double s : net.input_map().scale) w.f64(s);
  for (double s : net.input_map().shift) w.f64(s);
  const auto theta = net.get_params();
  w.u64(theta.size());
  for (double p : theta) w.f64(p);
  return w.take();
}

Mlp deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic();
  const std::uint32_t n_dims = r.u32();
  if (n_dims < 2 || n_dims > 64) throw std::runtime_error("checkpoint: bad layer count");
  std::vector<int> dims;
  for (std::uint32_t i = 0; i < n_dims; ++i) {
    const std::uint32_t d = r.u32();
    if (d == 0 || d > (1u << 20)) throw std::runtime_error("checkpoint: bad layer width");
    dims.push_back(static_cast<int>(d));
  }
  const std::uint64_t seed = r.u64();
  InputMap map;
  for (int i = 0; i < dims.front(); ++i) map.scale.push_back(r.f64());
  for (int i = 0; i < dims.front(); ++i) map.shift.push_back(r.f64());
  const std::uint64_t n_params = r.u64();
  if (n_params != param_count_for(dims)) {
    throw std::runtime_error("checkpoint: parameter count does not match layer dims");
  }
  std::vector<double> theta(n_params);
  for (auto& p : theta) p = r.f64();
  if (!r.done()) throw std::runtime_error("checkpoint: trailing bytes");

  Mlp net = Mlp::init(dims, seed, map);
  net.set_params(theta);
  return net;
}

void save_checkpoint(const Mlp& net, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(net);
  write_file_atomic(path, std::string(bytes.begin(), bytes.end()));
}

Mlp load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace pinn
