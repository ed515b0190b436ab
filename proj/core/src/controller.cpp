#include "fuzex/controller.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace fuzex {

namespace {

// y = M x, M row-major (rows x cols).
void matvec(std::vector<double>& y, const std::vector<double>& m, int rows, int cols,
            const double* x) {
  for (int r = 0; r < rows; ++r) {
    double acc = 0.0;
    const double* row = m.data() + static_cast<std::size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[static_cast<std::size_t>(r)] = acc;
  }
}

// y += M^T g.
void matvec_transpose_add(double* y, const std::vector<double>& m, int rows, int cols,
                          const double* g) {
  for (int r = 0; r < rows; ++r) {
    const double gr = g[r];
    if (gr == 0.0) continue;
    const double* row = m.data() + static_cast<std::size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) y[c] += row[c] * gr;
  }
}

// M += outer(g, x).
void outer_add(std::vector<double>& m, int rows, int cols, const double* g, const double* x) {
  for (int r = 0; r < rows; ++r) {
    const double gr = g[r];
    if (gr == 0.0) continue;
    double* row = m.data() + static_cast<std::size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) row[c] += gr * x[c];
  }
}

// Tracks the parent/sibling of the next open slot while a pre-order traversal
// is written left to right.
class SlotState {
 public:
  explicit SlotState(int empty_token) : empty_(empty_token) {}

  int parent() const { return frames_.empty() ? empty_ : frames_.back().token; }
  int sibling() const {
    if (frames_.empty() || frames_.back().filled == 0) return empty_;
    return frames_.back().first_child;
  }
  bool complete() const { return started_ && frames_.empty(); }

  void push(const Token& tok) {
    started_ = true;
    if (!frames_.empty()) {
      Frame& top = frames_.back();
      if (top.filled == 0) top.first_child = tok.id;
      ++top.filled;
    }
    if (tok.arity > 0) {
      frames_.push_back(Frame{tok.id, tok.arity, 0, empty_});
    }
    while (!frames_.empty() && frames_.back().filled == frames_.back().arity) {
      frames_.pop_back();
    }
  }

 private:
  struct Frame {
    int token;
    int arity;
    int filled;
    int first_child;
  };
  std::vector<Frame> frames_;
  int empty_;
  bool started_ = false;
};

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

}  // namespace

void ParamTensors::resize(int library_size, int hidden_size, double fill_value) {
  const std::size_t h = static_cast<std::size_t>(hidden_size);
  const std::size_t l = static_cast<std::size_t>(library_size);
  embed_parent.assign((l + 1) * h, fill_value);
  embed_sibling.assign((l + 1) * h, fill_value);
  w_in.assign(h * 2 * h, fill_value);
  w_rec.assign(h * h, fill_value);
  b_rec.assign(h, fill_value);
  w_out.assign(l * h, fill_value);
  b_out.assign(l, fill_value);
}

bool ParamTensors::all_finite() const {
  for (const auto* vec : {&embed_parent, &embed_sibling, &w_in, &w_rec, &b_rec, &w_out, &b_out}) {
    for (double v : *vec) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

bool ParamTensors::same_shape(const ParamTensors& other) const {
  return embed_parent.size() == other.embed_parent.size() &&
         embed_sibling.size() == other.embed_sibling.size() && w_in.size() == other.w_in.size() &&
         w_rec.size() == other.w_rec.size() && b_rec.size() == other.b_rec.size() &&
         w_out.size() == other.w_out.size() && b_out.size() == other.b_out.size();
}

template <typename Fn>
void ParamTensors::for_each(ParamTensors& a, ParamTensors& b, Fn&& fn) {
  auto visit = [&fn](std::vector<double>& x, std::vector<double>& y, std::vector<double>& z) {
    for (std::size_t i = 0; i < x.size(); ++i) fn(x[i], y[i], z[i]);
  };
  visit(embed_parent, a.embed_parent, b.embed_parent);
  visit(embed_sibling, a.embed_sibling, b.embed_sibling);
  visit(w_in, a.w_in, b.w_in);
  visit(w_rec, a.w_rec, b.w_rec);
  visit(b_rec, a.b_rec, b.b_rec);
  visit(w_out, a.w_out, b.w_out);
  visit(b_out, a.b_out, b.b_out);
}

Controller::Controller(int library_size, int hidden_size, std::uint64_t seed)
    : library_size_(library_size), hidden_size_(hidden_size) {
  if (library_size <= 0 || hidden_size <= 0) {
    throw std::invalid_argument("controller sizes must be positive");
  }
  params_.resize(library_size, hidden_size);
  adam_m_.resize(library_size, hidden_size);
  adam_v_.resize(library_size, hidden_size);

  Rng rng(derive_seed(seed, 0x11));
  for (auto* vec : {&params_.embed_parent, &params_.embed_sibling, &params_.w_in, &params_.w_rec,
                    &params_.b_rec}) {
    for (double& v : *vec) v = rng.next_uniform(-0.1, 0.1);
  }
  // Zero output head: the starting policy is uniform over valid tokens.
}

namespace {

// Per-step forward record, kept for backpropagation through time.
struct StepBack {
  int parent = 0;
  int sibling = 0;
  int action = 0;
  std::vector<double> x;      // 2H
  std::vector<double> h;      // H
  std::vector<double> probs;  // library_size, zero on masked entries
  double log_prob = 0.0;
  double entropy = 0.0;
};

struct StepScratch {
  std::vector<double> pre;
  std::vector<double> logits;
};

// Runs the recurrent cell + masked softmax for one step; fills rec.{x,h,probs}
// and the distribution stats. rec.parent/sibling must be set.
void step_forward(const ParamTensors& p, int hidden, int lib_size,
                  const std::vector<double>& h_prev, const std::vector<bool>& mask,
                  StepBack& rec, StepScratch& scratch) {
  const std::size_t h = static_cast<std::size_t>(hidden);
  rec.x.resize(2 * h);
  const double* ep = p.embed_parent.data() + static_cast<std::size_t>(rec.parent) * h;
  const double* es = p.embed_sibling.data() + static_cast<std::size_t>(rec.sibling) * h;
  std::copy(ep, ep + h, rec.x.begin());
  std::copy(es, es + h, rec.x.begin() + static_cast<std::ptrdiff_t>(h));

  scratch.pre.resize(h);
  matvec(scratch.pre, p.w_in, hidden, 2 * hidden, rec.x.data());
  for (int r = 0; r < hidden; ++r) {
    double acc = scratch.pre[static_cast<std::size_t>(r)];
    const double* row = p.w_rec.data() + static_cast<std::size_t>(r) * h;
    for (int c = 0; c < hidden; ++c) acc += row[c] * h_prev[static_cast<std::size_t>(c)];
    scratch.pre[static_cast<std::size_t>(r)] = acc + p.b_rec[static_cast<std::size_t>(r)];
  }
  rec.h.resize(h);
  for (std::size_t i = 0; i < h; ++i) rec.h[i] = std::tanh(scratch.pre[i]);

  scratch.logits.resize(static_cast<std::size_t>(lib_size));
  matvec(scratch.logits, p.w_out, lib_size, hidden, rec.h.data());
  for (int i = 0; i < lib_size; ++i) scratch.logits[static_cast<std::size_t>(i)] += p.b_out[static_cast<std::size_t>(i)];

  double zmax = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < lib_size; ++i) {
    if (mask[static_cast<std::size_t>(i)]) zmax = std::max(zmax, scratch.logits[static_cast<std::size_t>(i)]);
  }
  if (!std::isfinite(zmax)) {
    throw std::logic_error("masked distribution has no valid token (constraint bug)");
  }
  double sum = 0.0;
  rec.probs.assign(static_cast<std::size_t>(lib_size), 0.0);
  for (int i = 0; i < lib_size; ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    const double e = std::exp(scratch.logits[static_cast<std::size_t>(i)] - zmax);
    rec.probs[static_cast<std::size_t>(i)] = e;
    sum += e;
  }
  double entropy = 0.0;
  for (int i = 0; i < lib_size; ++i) {
    double& pr = rec.probs[static_cast<std::size_t>(i)];
    if (pr == 0.0) continue;
    pr /= sum;
    if (pr > 0.0) entropy -= pr * std::log(pr);
  }
  rec.entropy = entropy;
}

}  // namespace

Trajectory Controller::sample(const Library& lib, const ConstraintConfig& cfg, Rng& rng) const {
  if (lib.size() != library_size_) {
    throw std::invalid_argument("library size does not match controller");
  }
  cfg.validate(lib);

  Trajectory traj;
  SlotState slots(library_size_);
  std::vector<double> h_prev(static_cast<std::size_t>(hidden_size_), 0.0);
  StepBack rec;
  StepScratch scratch;

  while (!slots.complete()) {
    const auto mask = valid_token_mask(traj.traversal, lib, cfg);
    rec.parent = slots.parent();
    rec.sibling = slots.sibling();
    step_forward(params_, hidden_size_, library_size_, h_prev, mask, rec, scratch);

    const double u = rng.next_double();
    double cum = 0.0;
    int action = -1;
    for (int i = 0; i < library_size_; ++i) {
      const double pr = rec.probs[static_cast<std::size_t>(i)];
      if (pr <= 0.0) continue;
      cum += pr;
      action = i;
      if (u < cum) break;
    }
    if (action < 0) throw std::logic_error("categorical draw found no valid token");

    const double pr = rec.probs[static_cast<std::size_t>(action)];
    traj.traversal.ids.push_back(action);
    traj.step_log_probs.push_back(std::log(pr));
    traj.step_entropies.push_back(rec.entropy);
    slots.push(lib.token(action));
    h_prev = rec.h;
  }
  for (double lp : traj.step_log_probs) traj.total_log_prob += lp;
  for (double e : traj.step_entropies) traj.total_entropy += e;
  return traj;
}

double Controller::accumulate_objective_grad(const Traversal& traversal, const Library& lib,
                                             const ConstraintConfig& cfg, double advantage,
                                             double entropy_weight, ParamTensors& grad) const {
  if (traversal.empty()) throw std::invalid_argument("empty traversal");
  const std::size_t h = static_cast<std::size_t>(hidden_size_);

  // Forward pass, recording per-step state.
  std::vector<StepBack> steps(traversal.size());
  {
    SlotState slots(library_size_);
    Traversal prefix;
    std::vector<double> h_prev(h, 0.0);
    StepScratch scratch;
    for (std::size_t t = 0; t < traversal.size(); ++t) {
      const auto mask = valid_token_mask(prefix, lib, cfg);
      const int action = traversal.ids[t];
      if (action < 0 || action >= library_size_ || !mask[static_cast<std::size_t>(action)]) {
        throw std::invalid_argument("traversal unreachable under constraint masks at step " +
                                    std::to_string(t));
      }
      StepBack& rec = steps[t];
      rec.parent = slots.parent();
      rec.sibling = slots.sibling();
      step_forward(params_, hidden_size_, library_size_, h_prev, mask, rec, scratch);
      rec.action = action;
      rec.log_prob = std::log(rec.probs[static_cast<std::size_t>(action)]);
      prefix.ids.push_back(action);
      slots.push(lib.token(action));
      h_prev = rec.h;
    }
  }

  double total_log_prob = 0.0;
  double total_entropy = 0.0;
  for (const auto& rec : steps) {
    total_log_prob += rec.log_prob;
    total_entropy += rec.entropy;
  }

  // Backward through time.
  std::vector<double> g_logits(static_cast<std::size_t>(library_size_));
  std::vector<double> delta_h(h);
  std::vector<double> delta_pre_next(h, 0.0);
  std::vector<double> delta_pre(h);
  std::vector<double> g_x(2 * h);
  for (std::size_t t = steps.size(); t-- > 0;) {
    const StepBack& rec = steps[t];
    for (int i = 0; i < library_size_; ++i) {
      const double p = rec.probs[static_cast<std::size_t>(i)];
      double g = 0.0;
      if (p > 0.0) {
        g = advantage * ((i == rec.action ? 1.0 : 0.0) - p);
        if (entropy_weight != 0.0) {
          g += entropy_weight * (-p * (std::log(p) + rec.entropy));
        }
      } else if (i == rec.action) {
        g = advantage;  // p underflowed; keep the indicator part
      }
      g_logits[static_cast<std::size_t>(i)] = g;
    }

    outer_add(grad.w_out, library_size_, hidden_size_, g_logits.data(), rec.h.data());
    for (int i = 0; i < library_size_; ++i) grad.b_out[static_cast<std::size_t>(i)] += g_logits[static_cast<std::size_t>(i)];

    std::fill(delta_h.begin(), delta_h.end(), 0.0);
    matvec_transpose_add(delta_h.data(), params_.w_out, library_size_, hidden_size_,
                         g_logits.data());
    // Recurrent contribution from step t+1.
    matvec_transpose_add(delta_h.data(), params_.w_rec, hidden_size_, hidden_size_,
                         delta_pre_next.data());

    for (std::size_t i = 0; i < h; ++i) {
      delta_pre[i] = delta_h[i] * (1.0 - rec.h[i] * rec.h[i]);
    }

    const double* h_prev = t > 0 ? steps[t - 1].h.data() : nullptr;
    outer_add(grad.w_in, hidden_size_, 2 * hidden_size_, delta_pre.data(), rec.x.data());
    if (h_prev != nullptr) {
      outer_add(grad.w_rec, hidden_size_, hidden_size_, delta_pre.data(), h_prev);
    }
    for (std::size_t i = 0; i < h; ++i) grad.b_rec[i] += delta_pre[i];

    std::fill(g_x.begin(), g_x.end(), 0.0);
    matvec_transpose_add(g_x.data(), params_.w_in, hidden_size_, 2 * hidden_size_,
                         delta_pre.data());
    double* gp = grad.embed_parent.data() + static_cast<std::size_t>(rec.parent) * h;
    double* gs = grad.embed_sibling.data() + static_cast<std::size_t>(rec.sibling) * h;
    for (std::size_t i = 0; i < h; ++i) {
      gp[i] += g_x[i];
      gs[i] += g_x[h + i];
    }
    delta_pre_next = delta_pre;
  }

  return advantage * total_log_prob + entropy_weight * total_entropy;
}

std::pair<double, ParamTensors> Controller::log_prob_and_grad(const Traversal& traversal,
                                                              const Library& lib,
                                                              const ConstraintConfig& cfg) const {
  ParamTensors grad;
  grad.resize(library_size_, hidden_size_);
  const double lp = accumulate_objective_grad(traversal, lib, cfg, 1.0, 0.0, grad);
  return {lp, std::move(grad)};
}

std::pair<double, ParamTensors> Controller::entropy_and_grad(const Traversal& traversal,
                                                             const Library& lib,
                                                             const ConstraintConfig& cfg) const {
  ParamTensors grad;
  grad.resize(library_size_, hidden_size_);
  const double ent = accumulate_objective_grad(traversal, lib, cfg, 0.0, 1.0, grad);
  return {ent, std::move(grad)};
}

void Controller::gradient_step(std::span<const Trajectory> trajectories,
                               std::span<const double> advantages, const Library& lib,
                               const ConstraintConfig& cfg, double learning_rate,
                               double entropy_weight) {
  if (trajectories.size() != advantages.size()) {
    throw std::invalid_argument("gradient_step: trajectories/advantages length mismatch");
  }
  if (trajectories.empty()) return;
  for (double a : advantages) {
    if (a < 0.0) throw std::invalid_argument("gradient_step: advantages must be >= 0");
  }

  ParamTensors grad;
  grad.resize(library_size_, hidden_size_);
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    accumulate_objective_grad(trajectories[i].traversal, lib, cfg, advantages[i], entropy_weight,
                              grad);
  }
  const double scale = 1.0 / static_cast<double>(trajectories.size());
  bool any_nonzero = false;
  grad.for_each(grad, grad, [&](double& g, double&, double&) {
    g *= scale;
    if (g != 0.0) any_nonzero = true;
  });
  if (!any_nonzero) return;
  if (!grad.all_finite()) {
    throw std::runtime_error("gradient_step: non-finite gradient, step aborted");
  }

  ++adam_step_;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(adam_step_));
  const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(adam_step_));
  ParamTensors* m = &adam_m_;
  ParamTensors* v = &adam_v_;
  // Walk (grad, m, v) in lockstep, updating params by ascent.
  auto update = [&](std::vector<double>& gvec, std::vector<double>& mvec,
                    std::vector<double>& vvec, std::vector<double>& pvec) {
    for (std::size_t i = 0; i < gvec.size(); ++i) {
      mvec[i] = kAdamBeta1 * mvec[i] + (1.0 - kAdamBeta1) * gvec[i];
      vvec[i] = kAdamBeta2 * vvec[i] + (1.0 - kAdamBeta2) * gvec[i] * gvec[i];
      const double mhat = mvec[i] / bc1;
      const double vhat = vvec[i] / bc2;
      pvec[i] += learning_rate * mhat / (std::sqrt(vhat) + kAdamEps);
    }
  };
  update(grad.embed_parent, m->embed_parent, v->embed_parent, params_.embed_parent);
  update(grad.embed_sibling, m->embed_sibling, v->embed_sibling, params_.embed_sibling);
  update(grad.w_in, m->w_in, v->w_in, params_.w_in);
  update(grad.w_rec, m->w_rec, v->w_rec, params_.w_rec);
  update(grad.b_rec, m->b_rec, v->b_rec, params_.b_rec);
  update(grad.w_out, m->w_out, v->w_out, params_.w_out);
  update(grad.b_out, m->b_out, v->b_out, params_.b_out);
}

namespace {

nlohmann::json tensors_to_json(const ParamTensors& t) {
  return nlohmann::json{{"embed_parent", t.embed_parent}, {"embed_sibling", t.embed_sibling},
                        {"w_in", t.w_in},                 {"w_rec", t.w_rec},
                        {"b_rec", t.b_rec},               {"w_out", t.w_out},
                        {"b_out", t.b_out}};
}

void tensors_from_json(const nlohmann::json& j, ParamTensors& t) {
  j.at("embed_parent").get_to(t.embed_parent);
  j.at("embed_sibling").get_to(t.embed_sibling);
  j.at("w_in").get_to(t.w_in);
  j.at("w_rec").get_to(t.w_rec);
  j.at("b_rec").get_to(t.b_rec);
  j.at("w_out").get_to(t.w_out);
  j.at("b_out").get_to(t.b_out);
}

}  // namespace

void Controller::save_checkpoint(const std::string& path) const {
  nlohmann::json j{{"format_version", 1},
                   {"hidden_size", hidden_size_},
                   {"library_size", library_size_},
                   {"adam_step", adam_step_},
                   {"params", tensors_to_json(params_)},
                   {"adam_m", tensors_to_json(adam_m_)},
                   {"adam_v", tensors_to_json(adam_v_)}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << j.dump(2) << '\n';
}

Controller Controller::load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  nlohmann::json j;
  in >> j;
  if (j.at("format_version").get<int>() != 1) {
    throw std::runtime_error("unsupported checkpoint version");
  }
  Controller c(j.at("library_size").get<int>(), j.at("hidden_size").get<int>(), 0);
  ParamTensors expected;
  expected.resize(c.library_size_, c.hidden_size_);
  tensors_from_json(j.at("params"), c.params_);
  tensors_from_json(j.at("adam_m"), c.adam_m_);
  tensors_from_json(j.at("adam_v"), c.adam_v_);
  c.adam_step_ = j.at("adam_step").get<long>();
  if (!c.params_.same_shape(expected) || !c.adam_m_.same_shape(expected) ||
      !c.adam_v_.same_shape(expected)) {
    throw std::runtime_error("checkpoint tensor shapes do not match its header");
  }
  if (!c.params_.all_finite()) throw std::runtime_error("checkpoint contains non-finite values");
  return c;
}

}  // namespace fuzex
