#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fuzex/constraints.hpp"
#include "fuzex/expr.hpp"
#include "fuzex/library.hpp"
#include "fuzex/rng.hpp"

namespace fuzex {

// One sampled traversal together with the log-probabilities and entropies of
// each categorical decision under the masked policy (all in nats).
struct Trajectory {
  Traversal traversal;
  std::vector<double> step_log_probs;
  std::vector<double> step_entropies;
  double total_log_prob = 0.0;
  double total_entropy = 0.0;
};

// Flat parameter storage shared by weights, gradients and optimizer moments.
struct ParamTensors {
  std::vector<double> embed_parent;   // (library_size+1) x hidden
  std::vector<double> embed_sibling;  // (library_size+1) x hidden
  std::vector<double> w_in;           // hidden x 2*hidden
  std::vector<double> w_rec;          // hidden x hidden
  std::vector<double> b_rec;          // hidden
  std::vector<double> w_out;          // library_size x hidden
  std::vector<double> b_out;          // library_size

  void resize(int library_size, int hidden_size, double fill = 0.0);
  bool all_finite() const;
  bool same_shape(const ParamTensors& other) const;
  template <typename Fn>
  void for_each(ParamTensors& other_a, ParamTensors& other_b, Fn&& fn);
};

// Autoregressive recurrent policy over a token library. At each step the
// input is the pair of embeddings of the parent and sibling tokens of the
// next open slot (a distinguished EMPTY entry when absent), run through a
// single tanh recurrent cell and projected to logits over the library.
// Invalid tokens are masked out before the softmax.
class Controller {
 public:
  Controller(int library_size, int hidden_size, std::uint64_t seed);

  int library_size() const { return library_size_; }
  int hidden_size() const { return hidden_size_; }
  const ParamTensors& params() const { return params_; }
  ParamTensors& mutable_params() { return params_; }

  Trajectory sample(const Library& lib, const ConstraintConfig& cfg, Rng& rng) const;

  // Log-probability of an existing traversal under the current parameters and
  // its analytic gradient (backpropagation through time). Throws when the
  // traversal is unreachable under the masks.
  std::pair<double, ParamTensors> log_prob_and_grad(const Traversal& traversal,
                                                    const Library& lib,
                                                    const ConstraintConfig& cfg) const;

  // Total entropy of the per-step masked distributions along a traversal,
  // with its gradient. Used by tests; gradient_step folds both terms.
  std::pair<double, ParamTensors> entropy_and_grad(const Traversal& traversal, const Library& lib,
                                                   const ConstraintConfig& cfg) const;

  // Ascent step on mean_i [advantage_i * log p(traj_i) + entropy_weight *
  // entropy(traj_i)] with Adam moments. A step with an identically zero
  // gradient leaves parameters (and moments) untouched. Throws on non-finite
  // gradients without touching parameters.
  void gradient_step(std::span<const Trajectory> trajectories, std::span<const double> advantages,
                     const Library& lib, const ConstraintConfig& cfg, double learning_rate,
                     double entropy_weight);

  void save_checkpoint(const std::string& path) const;
  static Controller load_checkpoint(const std::string& path);

 private:
  // advantage/entropy_weight generalized backward; accumulates into grad.
  double accumulate_objective_grad(const Traversal& traversal, const Library& lib,
                                   const ConstraintConfig& cfg, double advantage,
                                   double entropy_weight, ParamTensors& grad) const;

  int library_size_ = 0;
  int hidden_size_ = 0;
  ParamTensors params_;
  ParamTensors adam_m_;
  ParamTensors adam_v_;
  long adam_step_ = 0;
};

}  // namespace fuzex
