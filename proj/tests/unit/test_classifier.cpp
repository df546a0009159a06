#include "helpers.hpp"

#include "rffid/classifier.hpp"
#include "rffid/error.hpp"

#include <doctest.h>

#include <numbers>
#include <sstream>

using namespace rffid;

namespace {

LabeledDataset clouds(std::uint32_t seed, int classes, int per_class, double spread, bool random_labels = false)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g(0.0, spread);
    std::uniform_int_distribution<int> pick(0, classes - 1);
    LabeledDataset d;
    for (int c = 0; c < classes; ++c)
        for (int k = 0; k < per_class; ++k) {
            const double a = 2.0 * std::numbers::pi * c / classes;
            std::vector<double> f{3.0 * std::cos(a) + g(gen), 3.0 * std::sin(a) + g(gen), g(gen)};
            d.add(std::move(f), random_labels ? pick(gen) : c);
        }
    return d;
}

} // namespace

TEST_SUITE("classifier")
{
    TEST_CASE("separable clouds are fit exactly")
    {
        const auto data = clouds(1, 2, 40, 0.2);
        const auto model = train(data);
        CHECK(evaluate(model, data) == 1.0);
        for (std::size_t i = 0; i < data.size(); ++i)
            CHECK(model.predict(data.features[i]).label == data.labels[i]);

        const auto five = clouds(2, 5, 30, 0.2);
        CHECK(evaluate(train(five), five) == 1.0);
        CHECK(evaluate(train(five), clouds(3, 5, 30, 0.2)) == 1.0);
    }

    TEST_CASE("training is deterministic and batch-size invariant")
    {
        const auto data = clouds(4, 3, 25, 1.0);
        const auto a = train(data);
        const auto b = train(data);
        CHECK(a.weights == b.weights);
        CHECK(a.bias == b.bias);

        LabeledDataset twice = data;
        for (std::size_t i = 0; i < data.size(); ++i)
            twice.add(data.features[i], data.labels[i]);
        const auto c = train(twice);
        for (std::size_t k = 0; k < a.weights.size(); ++k) {
            CHECK(c.bias[k] == doctest::Approx(a.bias[k]).epsilon(1e-9));
            for (std::size_t j = 0; j < a.dim; ++j)
                CHECK(c.weights[k][j] == doctest::Approx(a.weights[k][j]).epsilon(1e-9));
        }
        CHECK(evaluate(a, data) == evaluate(c, data));
    }

    TEST_CASE("standardization makes the model scale free")
    {
        const auto data = clouds(5, 3, 25, 1.0);
        auto scaled = data;
        for (auto& f : scaled.features) {
            f[0] = 1000.0 * f[0] + 5.0;
            f[2] *= 1e-3;
        }
        const auto a = train(data);
        const auto b = train(scaled);
        for (std::size_t i = 0; i < data.size(); ++i)
            CHECK(a.predict(data.features[i]).label == b.predict(scaled.features[i]).label);

        LabeledDataset flat;
        flat.add({1.0, 2.0}, 0);
        flat.add({1.0, 3.0}, 1);
        const auto s = Standardizer::fit(flat);
        CHECK(s.inv_std[0] == 0.0);
        const std::vector<double> probe{7.0, 2.5};
        CHECK(s.apply(probe)[0] == 0.0);
    }

    TEST_CASE("ties go to the lowest class")
    {
        TrainedModel m;
        m.classes = 3;
        m.dim = 1;
        m.weights = {{1.0}, {-1.0}, {-5.0}};
        m.bias = {0.0, 0.0, -10.0};
        m.standardizer.mean = {0.0};
        m.standardizer.inv_std = {1.0};
        const std::vector<double> boundary{0.0};
        CHECK(m.predict(boundary).label == 0);
        const std::vector<double> neg{-1.0};
        CHECK(m.predict(neg).label == 1);
        const std::vector<double> wrong{0.0, 1.0};
        CHECK_THROWS_AS(m.predict(wrong), InvalidInput);

        const std::vector<double> v{1.0, 3.0, 3.0};
        CHECK(argmax(v) == 1);
    }

    TEST_CASE("chance level on random labels")
    {
        double total = 0.0;
        const int runs = 20;
        for (int r = 0; r < runs; ++r) {
            const auto train_set = clouds(100 + r, 5, 40, 1.0, true);
            const auto test_set = clouds(200 + r, 5, 40, 1.0, true);
            total += evaluate(train(train_set), test_set);
        }
        CHECK(std::abs(total / runs - 0.2) < 0.04);
    }

    TEST_CASE("input contracts")
    {
        LabeledDataset one;
        one.add({1.0}, 0);
        one.add({2.0}, 0);
        CHECK_THROWS_AS(train(one), InvalidInput);
        CHECK_THROWS_AS(train(LabeledDataset{}), InvalidInput);

        LabeledDataset ragged;
        ragged.add({1.0}, 0);
        ragged.add({1.0, 2.0}, 1);
        CHECK_THROWS_AS(ragged.validate(), InvalidInput);

        const auto data = clouds(6, 2, 5, 0.1);
        const auto model = train(data);
        LabeledDataset other;
        other.add({1.0, 2.0}, 0);
        CHECK_THROWS_AS(evaluate(model, other), InvalidInput);
        CHECK_THROWS_AS(evaluate(model, LabeledDataset{}), InvalidInput);

        TrainConfig bad;
        bad.epochs = 0;
        CHECK_THROWS_AS(train(data, bad), InvalidInput);
    }

    TEST_CASE("model persistence")
    {
        const auto data = clouds(7, 4, 20, 1.5);
        const auto model = train(data);
        std::stringstream buf;
        save_model(buf, model);
        const auto back = load_model(buf);
        CHECK(back.classes == 4);
        CHECK(back.weights == model.weights);
        CHECK(back.bias == model.bias);
        CHECK(back.standardizer.mean == model.standardizer.mean);
        for (const auto& f : data.features)
            CHECK(back.predict(f).scores == model.predict(f).scores);

        std::stringstream again;
        save_model(again, back);
        std::stringstream first;
        save_model(first, model);
        CHECK(again.str() == first.str());

        std::stringstream junk("rffid-model 1\nclasses 2 dim");
        CHECK_THROWS_AS(load_model(junk), IoError);
    }
}
