#include "rffid/classifier.hpp"

#include "rffid/error.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace rffid {

void LabeledDataset::add(std::vector<double> feature, int label)
{
    features.push_back(std::move(feature));
    labels.push_back(label);
}

int LabeledDataset::class_count() const
{
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

void LabeledDataset::validate() const
{
    if (features.size() != labels.size())
        throw InvalidInput("feature and label counts differ");
    for (const auto& f : features) {
        if (f.size() != dim())
            throw InvalidInput("feature dimensions differ within the dataset");
        for (double v : f)
            if (!std::isfinite(v))
                throw InvalidInput("non-finite feature value");
    }
    for (int l : labels)
        if (l < 0)
            throw InvalidInput("labels must be non-negative");
}

Standardizer Standardizer::fit(const LabeledDataset& data)
{
    const std::size_t d = data.dim();
    const auto n = static_cast<double>(data.size());
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.inv_std.assign(d, 0.0);
    for (const auto& f : data.features)
        for (std::size_t k = 0; k < d; ++k)
            s.mean[k] += f[k];
    for (auto& m : s.mean)
        m /= n;
    std::vector<double> var(d, 0.0);
    for (const auto& f : data.features)
        for (std::size_t k = 0; k < d; ++k) {
            const double c = f[k] - s.mean[k];
            var[k] += c * c;
        }
    for (std::size_t k = 0; k < d; ++k) {
        const double sd = std::sqrt(var[k] / n);
        s.inv_std[k] = sd > 1e-12 * (1.0 + std::abs(s.mean[k])) ? 1.0 / sd : 0.0;
    }
    return s;
}

std::vector<double> Standardizer::apply(std::span<const double> x) const
{
    if (x.size() != mean.size())
        throw InvalidInput("feature dimension " + std::to_string(x.size()) + " does not match model dimension " +
                           std::to_string(mean.size()));
    std::vector<double> z(x.size());
    for (std::size_t k = 0; k < x.size(); ++k)
        z[k] = (x[k] - mean[k]) * inv_std[k];
    return z;
}

std::size_t argmax(std::span<const double> values)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best])
            best = i;
    return best;
}

std::vector<double> TrainedModel::raw_scores(std::span<const double> z) const
{
    std::vector<double> s(static_cast<std::size_t>(classes));
    for (std::size_t c = 0; c < s.size(); ++c) {
        double acc = bias[c];
        for (std::size_t k = 0; k < dim; ++k)
            acc += weights[c][k] * z[k];
        s[c] = acc;
    }
    return s;
}

Prediction TrainedModel::predict(std::span<const double> feature) const
{
    const auto z = standardizer.apply(feature);
    Prediction p;
    p.scores = raw_scores(z);
    p.label = static_cast<int>(argmax(p.scores));
    return p;
}

TrainedModel train(const LabeledDataset& data, const TrainConfig& config)
{
    data.validate();
    if (data.size() == 0)
        throw InvalidInput("empty training set");
    const int m = data.class_count();
    std::vector<int> per_class(static_cast<std::size_t>(std::max(m, 0)), 0);
    for (int l : data.labels)
        ++per_class[static_cast<std::size_t>(l)];
    const auto present = std::count_if(per_class.begin(), per_class.end(), [](int c) { return c > 0; });
    if (present < 2)
        throw InvalidInput("training needs at least two classes");
    if (config.epochs < 1 || !(config.lr > 0.0) || !(config.lambda >= 0.0))
        throw InvalidInput("bad training hyper-parameters");

    TrainedModel model;
    model.classes = m;
    model.dim = data.dim();
    model.lambda = config.lambda;
    model.epochs = config.epochs;
    model.standardizer = Standardizer::fit(data);

    std::vector<std::vector<double>> z;
    z.reserve(data.size());
    for (const auto& f : data.features)
        z.push_back(model.standardizer.apply(f));

    const std::size_t d = model.dim;
    const auto n = static_cast<double>(data.size());
    model.weights.assign(static_cast<std::size_t>(m), std::vector<double>(d, 0.0));
    model.bias.assign(static_cast<std::size_t>(m), 0.0);
    std::vector<double> gw(d);

    for (std::size_t c = 0; c < static_cast<std::size_t>(m); ++c) {
        auto& w = model.weights[c];
        double& b = model.bias[c];
        for (int t = 0; t < config.epochs; ++t) {
            std::fill(gw.begin(), gw.end(), 0.0);
            double gb = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) {
                const double y = data.labels[i] == static_cast<int>(c) ? 1.0 : -1.0;
                double s = b;
                for (std::size_t k = 0; k < d; ++k)
                    s += w[k] * z[i][k];
                if (y * s < 1.0) {
                    for (std::size_t k = 0; k < d; ++k)
                        gw[k] -= y * z[i][k];
                    gb -= y;
                }
            }
            const double step = config.lr / (1.0 + t);
            for (std::size_t k = 0; k < d; ++k)
                w[k] -= step * (config.lambda * w[k] + gw[k] / n);
            b -= step * gb / n;
        }
    }
    return model;
}

double evaluate(const TrainedModel& model, const LabeledDataset& data)
{
    if (data.size() == 0)
        throw InvalidInput("empty evaluation set");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (model.predict(data.features[i]).label == data.labels[i])
            ++hits;
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

namespace {

void put_row(std::ostream& out, const std::vector<double>& v)
{
    for (double x : v)
        out << ' ' << x;
}

std::vector<double> get_row(std::istream& in, std::size_t n)
{
    std::vector<double> v(n);
    for (auto& x : v)
        if (!(in >> x))
            throw IoError("truncated model file");
    return v;
}

void expect(std::istream& in, const std::string& word)
{
    std::string got;
    if (!(in >> got) || got != word)
        throw IoError("model file: expected '" + word + "', got '" + got + "'");
}

} // namespace

void save_model(std::ostream& out, const TrainedModel& model)
{
    const auto old = out.precision(17);
    out << "rffid-model 1\n";
    out << "classes " << model.classes << " dim " << model.dim << " lambda " << model.lambda << " epochs "
        << model.epochs << '\n';
    out << "mean";
    put_row(out, model.standardizer.mean);
    out << "\ninv_std";
    put_row(out, model.standardizer.inv_std);
    out << '\n';
    for (int c = 0; c < model.classes; ++c) {
        out << "class " << c << " bias " << model.bias[static_cast<std::size_t>(c)] << " w";
        put_row(out, model.weights[static_cast<std::size_t>(c)]);
        out << '\n';
    }
    out.precision(old);
}

TrainedModel load_model(std::istream& in)
{
    TrainedModel m;
    expect(in, "rffid-model");
    int version = 0;
    if (!(in >> version) || version != 1)
        throw IoError("unsupported model version");
    expect(in, "classes");
    in >> m.classes;
    expect(in, "dim");
    in >> m.dim;
    expect(in, "lambda");
    in >> m.lambda;
    expect(in, "epochs");
    in >> m.epochs;
    if (!in || m.classes < 1)
        throw IoError("bad model header");
    expect(in, "mean");
    m.standardizer.mean = get_row(in, m.dim);
    expect(in, "inv_std");
    m.standardizer.inv_std = get_row(in, m.dim);
    for (int c = 0; c < m.classes; ++c) {
        expect(in, "class");
        int idx = -1;
        in >> idx;
        if (idx != c)
            throw IoError("model classes out of order");
        expect(in, "bias");
        double b = 0.0;
        in >> b;
        m.bias.push_back(b);
        expect(in, "w");
        m.weights.push_back(get_row(in, m.dim));
    }
    return m;
}

} // namespace rffid
