#include "abcbp/network.hpp"

#include "abcbp/error.hpp"

#include <cmath>
#include <string>

namespace abcbp::nn {

std::string_view to_string(Transfer t)
{
    switch (t) {
    case Transfer::logistic: return "logistic";
    case Transfer::linear: return "linear";
    }
    return "unknown";
}

Transfer transfer_from_string(std::string_view s)
{
    if (s == "logistic") return Transfer::logistic;
    if (s == "linear") return Transfer::linear;
    throw ConfigError("unknown transfer function '" + std::string(s) + "'");
}

double activate(Transfer t, double net)
{
    switch (t) {
    case Transfer::logistic: return 1.0 / (1.0 + std::exp(-net));
    case Transfer::linear: return net;
    }
    return net;
}

double derivative(Transfer t, double net)
{
    switch (t) {
    case Transfer::logistic: {
        double f = activate(t, net);
        return f * (1.0 - f);
    }
    case Transfer::linear: return 1.0;
    }
    return 1.0;
}

Network::Network(std::vector<Layer> layers) : layers_(std::move(layers))
{
    if (layers_.empty()) throw ShapeError("network needs at least one layer");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const auto& l = layers_[i];
        if (l.weights.rows() != l.biases.size())
            throw ShapeError("layer " + std::to_string(i) + ": weight rows != bias length");
        if (l.weights.rows() == 0 || l.weights.cols() == 0)
            throw ShapeError("layer " + std::to_string(i) + " is empty");
        if (i > 0 && l.weights.cols() != layers_[i - 1].weights.rows())
            throw ShapeError("layer " + std::to_string(i) + " input width does not match previous layer");
    }
}

std::size_t Network::parameter_count() const
{
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.parameter_count();
    return n;
}

void Architecture::validate() const
{
    if (sizes.size() < 2) throw ConfigError("architecture needs an input and an output layer");
    for (auto s : sizes)
        if (s == 0) throw ConfigError("architecture layer widths must be positive");
}

std::size_t Architecture::parameter_count() const
{
    std::size_t n = 0;
    for (std::size_t i = 1; i < sizes.size(); ++i) n += sizes[i] * sizes[i - 1] + sizes[i];
    return n;
}

Network make_network(const Architecture& arch, std::span<const double> params)
{
    arch.validate();
    if (params.size() != arch.parameter_count())
        throw ShapeError("parameter vector has " + std::to_string(params.size()) + " entries, architecture needs " +
                         std::to_string(arch.parameter_count()));

    std::vector<Layer> layers;
    layers.reserve(arch.sizes.size() - 1);
    std::size_t k = 0;
    for (std::size_t i = 1; i < arch.sizes.size(); ++i) {
        const auto rows = static_cast<Eigen::Index>(arch.sizes[i]);
        const auto cols = static_cast<Eigen::Index>(arch.sizes[i - 1]);
        Layer l;
        l.weights.resize(rows, cols);
        l.biases.resize(rows);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) l.weights(r, c) = params[k++];
        for (Eigen::Index r = 0; r < rows; ++r) l.biases(r) = params[k++];
        l.transfer = (i + 1 == arch.sizes.size()) ? arch.output : arch.hidden;
        layers.push_back(std::move(l));
    }
    return Network(std::move(layers));
}

std::vector<double> flatten(const Network& net)
{
    std::vector<double> out;
    out.reserve(net.parameter_count());
    for (const auto& l : net.layers()) {
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c) out.push_back(l.weights(r, c));
        for (Eigen::Index r = 0; r < l.biases.size(); ++r) out.push_back(l.biases(r));
    }
    return out;
}

namespace {

void check_input(const Network& net, Eigen::Index width)
{
    if (static_cast<std::size_t>(width) != net.input_width())
        throw ShapeError("input has width " + std::to_string(width) + ", network expects " +
                         std::to_string(net.input_width()));
}

Eigen::VectorXd apply_transfer(Transfer t, const Eigen::VectorXd& net)
{
    Eigen::VectorXd a(net.size());
    for (Eigen::Index i = 0; i < net.size(); ++i) a(i) = activate(t, net(i));
    return a;
}

Eigen::VectorXd transfer_derivative(Transfer t, const Eigen::VectorXd& net)
{
    Eigen::VectorXd d(net.size());
    for (Eigen::Index i = 0; i < net.size(); ++i) d(i) = derivative(t, net(i));
    return d;
}

void check_finite(const Eigen::VectorXd& v, std::size_t layer)
{
    if (!v.allFinite()) throw NumericError("non-finite value in layer " + std::to_string(layer));
}

void check_target(const Network& net, Eigen::Index width)
{
    if (static_cast<std::size_t>(width) != net.output_width())
        throw ShapeError("target has width " + std::to_string(width) + ", network outputs " +
                         std::to_string(net.output_width()));
}

void check_dataset(const Network& net, const data::Dataset& data)
{
    check_input(net, data.features.cols());
    check_target(net, data.targets.cols());
}

// Per-layer gradient blocks, same shapes as the network.
struct LayerGradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    explicit LayerGradients(const Network& net)
    {
        for (const auto& l : net.layers()) {
            weights.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
            biases.push_back(Eigen::VectorXd::Zero(l.biases.size()));
        }
    }
};

// Adds one sample's gradient of (t - a)^T (t - a) into `g`, or overwrites it
// when `accumulate` is false.
void sample_gradient(const Network& net, const ForwardTrace& trace,
                     const Eigen::Ref<const Eigen::VectorXd>& target, LayerGradients& g, bool accumulate)
{
    const std::size_t depth = net.depth();
    Eigen::VectorXd s = output_sensitivity(trace, target);
    for (std::size_t i = depth; i-- > 0;) {
        if (i + 1 < depth) s = backprop_sensitivity(net.layer(i + 1), s, trace, i);
        if (accumulate) {
            g.weights[i].noalias() += s * trace.activations[i].transpose();
            g.biases[i] += s;
        } else {
            g.weights[i].noalias() = s * trace.activations[i].transpose();
            g.biases[i] = s;
        }
    }
}

} // namespace

ForwardTrace forward(const Network& net, const Eigen::Ref<const Eigen::VectorXd>& x)
{
    check_input(net, x.size());
    ForwardTrace trace;
    trace.net_inputs.reserve(net.depth());
    trace.activations.reserve(net.depth() + 1);
    trace.transfers.reserve(net.depth());
    trace.activations.emplace_back(x);
    for (std::size_t i = 0; i < net.depth(); ++i) {
        const auto& l = net.layer(i);
        Eigen::VectorXd n = l.weights * trace.activations.back() + l.biases;
        Eigen::VectorXd a = apply_transfer(l.transfer, n);
        check_finite(a, i);
        trace.net_inputs.push_back(std::move(n));
        trace.activations.push_back(std::move(a));
        trace.transfers.push_back(l.transfer);
    }
    return trace;
}

Eigen::VectorXd predict(const Network& net, const Eigen::Ref<const Eigen::VectorXd>& x)
{
    check_input(net, x.size());
    Eigen::VectorXd a = x;
    for (std::size_t i = 0; i < net.depth(); ++i) {
        const auto& l = net.layer(i);
        Eigen::VectorXd n = l.weights * a + l.biases;
        a = apply_transfer(l.transfer, n);
        check_finite(a, i);
    }
    return a;
}

double sample_sse(const Eigen::Ref<const Eigen::VectorXd>& target, const Eigen::Ref<const Eigen::VectorXd>& prediction)
{
    if (target.size() != prediction.size())
        throw ShapeError("target length " + std::to_string(target.size()) + " != prediction length " +
                         std::to_string(prediction.size()));
    double sum = 0.0;
    for (Eigen::Index i = 0; i < target.size(); ++i) {
        const double e = target(i) - prediction(i);
        sum += e * e;
    }
    return sum;
}

double total_sse(const Network& net, const data::Dataset& data)
{
    check_dataset(net, data);
    double sum = 0.0;
    for (Eigen::Index r = 0; r < data.features.rows(); ++r)
        sum += sample_sse(data.targets.row(r).transpose(), predict(net, data.features.row(r).transpose()));
    if (!std::isfinite(sum)) throw NumericError("sum of squared error is not finite");
    return sum;
}

Eigen::VectorXd output_sensitivity(const ForwardTrace& trace, const Eigen::Ref<const Eigen::VectorXd>& target)
{
    if (trace.net_inputs.empty() || trace.activations.size() != trace.net_inputs.size() + 1 ||
        trace.transfers.size() != trace.net_inputs.size())
        throw ShapeError("incomplete forward trace");
    const Eigen::VectorXd& a = trace.output();
    if (target.size() != a.size())
        throw ShapeError("target length " + std::to_string(target.size()) + " != output width " +
                         std::to_string(a.size()));
    const Eigen::VectorXd d = transfer_derivative(trace.transfers.back(), trace.net_inputs.back());
    return (-2.0 * d.array() * (target - a).array()).matrix();
}

Eigen::VectorXd backprop_sensitivity(const Layer& next, const Eigen::Ref<const Eigen::VectorXd>& next_sensitivity,
                                     const ForwardTrace& trace, std::size_t layer)
{
    if (layer + 1 >= trace.net_inputs.size()) throw ShapeError("layer index is not a hidden layer of the trace");
    const Eigen::VectorXd& n = trace.net_inputs[layer];
    if (next.weights.rows() != next_sensitivity.size() || next.weights.cols() != n.size())
        throw ShapeError("sensitivity recursion: shapes do not agree");
    const Eigen::VectorXd d = transfer_derivative(trace.transfers[layer], n);
    Eigen::VectorXd back = next.weights.transpose() * next_sensitivity;
    return (d.array() * back.array()).matrix();
}

std::vector<double> gradient(const Network& net, const data::Dataset& data)
{
    check_dataset(net, data);
    LayerGradients g(net);
    for (Eigen::Index r = 0; r < data.features.rows(); ++r) {
        const ForwardTrace trace = forward(net, data.features.row(r).transpose());
        sample_gradient(net, trace, data.targets.row(r).transpose(), g, true);
    }

    std::vector<double> out;
    out.reserve(net.parameter_count());
    for (std::size_t i = 0; i < net.depth(); ++i) {
        for (Eigen::Index r = 0; r < g.weights[i].rows(); ++r)
            for (Eigen::Index c = 0; c < g.weights[i].cols(); ++c) out.push_back(g.weights[i](r, c));
        for (Eigen::Index r = 0; r < g.biases[i].size(); ++r) out.push_back(g.biases[i](r));
    }
    return out;
}

Network bp_step(const Network& net, const data::Dataset& data, double eta)
{
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("learning rate must be finite and non-negative");
    check_dataset(net, data);
    LayerGradients g(net);
    for (Eigen::Index r = 0; r < data.features.rows(); ++r) {
        const ForwardTrace trace = forward(net, data.features.row(r).transpose());
        sample_gradient(net, trace, data.targets.row(r).transpose(), g, true);
    }
    Network out = net;
    for (std::size_t i = 0; i < out.depth(); ++i) {
        out.weights(i) -= eta * g.weights[i];
        out.biases(i) -= eta * g.biases[i];
    }
    for (std::size_t i = 0; i < out.depth(); ++i)
        if (!out.layer(i).weights.allFinite() || !out.layer(i).biases.allFinite())
            throw NumericError("back-propagation step produced non-finite parameters");
    return out;
}

Network bp_epoch(const Network& net, const data::Dataset& data, double eta)
{
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("learning rate must be finite and non-negative");
    check_dataset(net, data);
    Network out = net;
    LayerGradients g(out);
    for (Eigen::Index r = 0; r < data.features.rows(); ++r) {
        const ForwardTrace trace = forward(out, data.features.row(r).transpose());
        sample_gradient(out, trace, data.targets.row(r).transpose(), g, false);
        for (std::size_t i = 0; i < out.depth(); ++i) {
            out.weights(i) -= eta * g.weights[i];
            out.biases(i) -= eta * g.biases[i];
        }
    }
    for (std::size_t i = 0; i < out.depth(); ++i)
        if (!out.layer(i).weights.allFinite() || !out.layer(i).biases.allFinite())
            throw NumericError("back-propagation epoch produced non-finite parameters");
    return out;
}

} // namespace abcbp::nn
