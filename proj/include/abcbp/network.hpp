#ifndef ABCBP_NETWORK_HPP
#define ABCBP_NETWORK_HPP

#include "abcbp/dataset.hpp"

#include <Eigen/Core>

#include <span>
#include <string_view>
#include <vector>

namespace abcbp::nn {

enum class Transfer { logistic, linear };

std::string_view to_string(Transfer t);
Transfer transfer_from_string(std::string_view s);

double activate(Transfer t, double net);

// Derivative with respect to the net input, evaluated at `net`.
double derivative(Transfer t, double net);

struct Layer {
    Eigen::MatrixXd weights; // neurons x inputs
    Eigen::VectorXd biases;  // neurons
    Transfer transfer = Transfer::logistic;

    std::size_t inputs() const { return static_cast<std::size_t>(weights.cols()); }
    std::size_t neurons() const { return static_cast<std::size_t>(weights.rows()); }
    std::size_t parameter_count() const { return neurons() * inputs() + neurons(); }
};

class Network {
public:
    // Throws ShapeError if the layers do not chain or if there are none.
    explicit Network(std::vector<Layer> layers);

    const std::vector<Layer>& layers() const { return layers_; }
    const Layer& layer(std::size_t i) const { return layers_.at(i); }

    // Mutable parameter access. Shapes must not be changed through these.
    Eigen::MatrixXd& weights(std::size_t i) { return layers_.at(i).weights; }
    Eigen::VectorXd& biases(std::size_t i) { return layers_.at(i).biases; }

    std::size_t depth() const { return layers_.size(); }
    std::size_t input_width() const { return layers_.front().inputs(); }
    std::size_t output_width() const { return layers_.back().neurons(); }
    std::size_t parameter_count() const;

private:
    std::vector<Layer> layers_;
};

// Layer widths including the input layer, e.g. {4, 5, 3}.
struct Architecture {
    std::vector<std::size_t> sizes;
    Transfer hidden = Transfer::logistic;
    Transfer output = Transfer::logistic;

    // Throws ConfigError unless there are >= 2 sizes, all positive.
    void validate() const;
    std::size_t parameter_count() const;
    std::size_t input_width() const { return sizes.front(); }
    std::size_t output_width() const { return sizes.back(); }
};

// Parameter vectors use one canonical order everywhere: layer by layer, each
// layer's weights row-major followed by its biases.
Network make_network(const Architecture& arch, std::span<const double> params);
std::vector<double> flatten(const Network& net);

struct ForwardTrace {
    std::vector<Eigen::VectorXd> net_inputs;  // one per layer
    std::vector<Eigen::VectorXd> activations; // input first, then one per layer
    std::vector<Transfer> transfers;          // one per layer

    const Eigen::VectorXd& output() const { return activations.back(); }
};

// Throws ShapeError on an input width mismatch and NumericError when a
// layer produces a non-finite value.
ForwardTrace forward(const Network& net, const Eigen::Ref<const Eigen::VectorXd>& x);

// Final activation only.
Eigen::VectorXd predict(const Network& net, const Eigen::Ref<const Eigen::VectorXd>& x);

// Sum of squared differences.
double sample_sse(const Eigen::Ref<const Eigen::VectorXd>& target,
                  const Eigen::Ref<const Eigen::VectorXd>& prediction);

// Sum of sample_sse over every row, accumulated in row order.
double total_sse(const Network& net, const data::Dataset& data);

// S = -2 f'(N) * (t - a) for the output layer. The sign makes W - eta S a^T a
// descent step on the squared error.
Eigen::VectorXd output_sensitivity(const ForwardTrace& trace,
                                   const Eigen::Ref<const Eigen::VectorXd>& target);

// S^l = f'(N^l) * (W^{l+1})^T S^{l+1}. `layer` is the 0-based index of the
// hidden layer whose sensitivity is wanted; `next` is layer `layer + 1`.
Eigen::VectorXd backprop_sensitivity(const Layer& next,
                                     const Eigen::Ref<const Eigen::VectorXd>& next_sensitivity,
                                     const ForwardTrace& trace, std::size_t layer);

// Gradient of total_sse in canonical parameter order.
std::vector<double> gradient(const Network& net, const data::Dataset& data);

// One full-batch gradient-descent update of total_sse.
Network bp_step(const Network& net, const data::Dataset& data, double eta);

// One online pass: per-sample updates applied in row order.
Network bp_epoch(const Network& net, const data::Dataset& data, double eta);

} // namespace abcbp::nn

#endif
