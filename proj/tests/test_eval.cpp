#include <catch_amalgamated.hpp>

#include <numbers>

#include "support.hpp"

using namespace hsir;

namespace {

SampleSet blobs(std::mt19937_64& rng, const std::vector<Vector>& centers, int per_class, double sigma) {
  std::normal_distribution<double> g(0.0, sigma);
  const auto d = centers.front().size();
  Matrix x(d, static_cast<Eigen::Index>(centers.size()) * per_class);
  std::vector<PixelCoord> coords;
  std::vector<int> labels;
  Eigen::Index col = 0;
  for (std::size_t c = 0; c < centers.size(); ++c)
    for (int i = 0; i < per_class; ++i, ++col) {
      for (Eigen::Index b = 0; b < d; ++b) x(b, col) = centers[c](b) + g(rng);
      coords.push_back({static_cast<Index>(col), 0});
      labels.push_back(static_cast<int>(c) + 1);
    }
  return SampleSet(x, coords, labels);
}

double accuracy(const std::vector<int>& pred, const SampleSet& s) {
  double ok = 0.0;
  for (Index i = 0; i < s.size(); ++i) ok += pred[i] == s.label(i) ? 1.0 : 0.0;
  return ok / static_cast<double>(s.size());
}

// Coarse grid over unit directions and offsets for each one-vs-rest scorer, combined by argmax.
double grid_oracle_accuracy(const SampleSet& s, int classes) {
  LinearModel m;
  m.weights = Matrix::Zero(classes, 2);
  m.bias = Vector::Zero(classes);
  for (int c = 0; c < classes; ++c) {
    double best = -1.0;
    for (int a = 0; a < 360; a += 2) {
      const double t = a * std::numbers::pi / 180.0;
      const Eigen::RowVector2d w(std::cos(t), std::sin(t));
      for (double b = -8.0; b <= 8.0; b += 0.1) {
        double ok = 0.0;
        for (Index i = 0; i < s.size(); ++i) {
          const double score = w.dot(s.spectra.col(static_cast<Eigen::Index>(i)).head<2>()) + b;
          ok += (score > 0.0) == (s.label(i) == c + 1) ? 1.0 : 0.0;
        }
        if (ok > best) {
          best = ok;
          m.weights.row(c) = w;
          m.bias(c) = b;
        }
      }
    }
  }
  return accuracy(predict(m, s), s);
}

std::vector<Vector> circle_centers(int k, double r) {
  std::vector<Vector> out;
  for (int c = 0; c < k; ++c) {
    const double t = 2.0 * std::numbers::pi * c / k;
    out.push_back(Eigen::Vector2d(r * std::cos(t), r * std::sin(t)));
  }
  return out;
}

}  // namespace

TEST_CASE("linear classifier separates separable blobs", "[eval][svm]") {
  std::mt19937_64 rng(51);
  const auto s = blobs(rng, {Eigen::Vector2d(-2.0, 0.0), Eigen::Vector2d(2.0, 0.0)}, 40, 0.3);
  const auto model = train_linear_ovr(s, {1e-3, 50, 7});
  CHECK(accuracy(predict(model, s), s) == 1.0);
}

TEST_CASE("linear classifier is deterministic per seed", "[eval][svm]") {
  std::mt19937_64 rng(52);
  const auto s = blobs(rng, circle_centers(3, 2.0), 30, 1.0);
  const auto a = train_linear_ovr(s, {1e-3, 20, 3});
  const auto b = train_linear_ovr(s, {1e-3, 20, 3});
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
  CHECK_FALSE(train_linear_ovr(s, {1e-3, 20, 4}).weights == a.weights);
}

TEST_CASE("linear classifier tracks a grid-searched linear oracle", "[eval][svm]") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 3; ++trial) {
    const auto s = blobs(rng, circle_centers(3, 2.0), 60, 1.0);
    const double svm = accuracy(predict(train_linear_ovr(s, {1e-3, 50, 1}), s), s);
    const double oracle = grid_oracle_accuracy(s, 3);
    CHECK(std::abs(svm - oracle) <= 0.02);
  }
}

TEST_CASE("linear classifier input checks", "[eval][svm]") {
  const SampleSet one(Matrix::Zero(2, 3), {{0, 0}, {0, 1}, {0, 2}}, std::vector<int>{2, 2, 2});
  CHECK_THROWS_AS(train_linear_ovr(one, {}), TrainingError);
  const SampleSet unlabeled(Matrix::Zero(2, 2), {{0, 0}, {0, 1}});
  CHECK_THROWS_AS(train_linear_ovr(unlabeled, {}), TrainingError);
}

TEST_CASE("prediction takes the best score, lower class on ties", "[eval][predict]") {
  LinearModel m;
  m.weights = (Matrix(2, 1) << 1.0, -1.0).finished();
  m.bias = Vector::Zero(2);
  CHECK(predict(m, (Matrix(1, 1) << 3.0).finished()) == std::vector<int>{1});
  CHECK(predict(m, (Matrix(1, 1) << -3.0).finished()) == std::vector<int>{2});
  CHECK(predict(m, (Matrix(1, 1) << 0.0).finished()) == std::vector<int>{1});

  std::mt19937_64 rng(54);
  LinearModel r;
  r.weights = testing::random_matrix(rng, 4, 3);
  r.bias = testing::random_matrix(rng, 4, 1).col(0);
  const Matrix x = testing::random_matrix(rng, 3, 50);
  const Matrix scores = decision_scores(r, x);
  LinearModel scaled = r;
  scaled.weights *= 7.5;
  scaled.bias *= 7.5;
  CHECK(predict(scaled, x) == predict(r, x));
  for (Eigen::Index i = 0; i < 50; ++i)
    for (Eigen::Index c = 0; c < 4; ++c)
      CHECK(std::abs(scores(c, i) - (r.weights.row(c).dot(x.col(i)) + r.bias(c))) < 1e-12);
  CHECK_THROWS_AS(decision_scores(r, Matrix::Zero(2, 1)), ShapeError);
}

TEST_CASE("nearest neighbour labels", "[eval][1nn]") {
  Matrix x(1, 3);
  x << 0.0, 2.0, 10.0;
  const SampleSet train(x, {{0, 0}, {0, 1}, {0, 2}}, std::vector<int>{1, 2, 3});
  const Matrix q = (Matrix(1, 4) << -1.0, 1.0, 1.2, 9.0).finished();
  CHECK(predict_1nn(train, q) == std::vector<int>{1, 1, 2, 3});
}

TEST_CASE("metrics fixtures", "[eval][metrics]") {
  // [[4,1],[2,3]]
  const std::vector<int> truth{1, 1, 1, 1, 1, 2, 2, 2, 2, 2};
  const std::vector<int> pred{1, 1, 1, 1, 2, 1, 1, 2, 2, 2};
  const auto m = evaluate(truth, pred, 2);
  CHECK(m.confusion == std::vector<std::vector<std::int64_t>>{{4, 1}, {2, 3}});
  CHECK(m.overall_accuracy == Catch::Approx(0.7).epsilon(1e-15));
  CHECK(m.kappa == Catch::Approx(0.4).epsilon(1e-12));
  CHECK(m.per_class_accuracy[0] == Catch::Approx(0.8));
  CHECK(m.per_class_accuracy[1] == Catch::Approx(0.6));
  CHECK(m.average_accuracy == Catch::Approx(0.7));

  const auto chance = evaluate(truth, std::vector<int>(10, 1), 2);
  CHECK(chance.overall_accuracy == 0.5);
  CHECK(chance.kappa == 0.0);

  const auto perfect = evaluate(truth, truth, 2);
  CHECK(perfect.overall_accuracy == 1.0);
  CHECK(perfect.average_accuracy == 1.0);
  CHECK(perfect.kappa == 1.0);

  const auto absent = evaluate(std::vector<int>{1, 1, 3}, std::vector<int>{1, 2, 3}, 3);
  CHECK(std::isnan(absent.per_class_accuracy[1]));
  CHECK(absent.average_accuracy == Catch::Approx(0.75));

  CHECK_THROWS_AS(evaluate(truth, std::vector<int>{1}, 2), ShapeError);
}

TEST_CASE("metrics properties", "[eval][metrics]") {
  std::mt19937_64 rng(55);
  std::uniform_int_distribution<int> cls(1, 4);
  const std::vector<int> perm{3, 1, 4, 2};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> t(40), p(40);
    for (auto& v : t) v = cls(rng);
    for (std::size_t i = 0; i < 40; ++i) p[i] = (trial % 5 == 0 || cls(rng) > 2) ? t[i] : cls(rng);
    const auto m = evaluate(t, p, 4);
    CHECK(m.kappa <= m.overall_accuracy + 1e-15);
    bool diagonal = true;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        if (a != b && m.confusion[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] != 0) diagonal = false;
    CHECK((m.kappa == 1.0) == diagonal);

    std::vector<int> tp(40), pp(40);
    for (std::size_t i = 0; i < 40; ++i) {
      tp[i] = perm[static_cast<std::size_t>(t[i] - 1)];
      pp[i] = perm[static_cast<std::size_t>(p[i] - 1)];
    }
    const auto r = evaluate(tp, pp, 4);
    CHECK(r.overall_accuracy == m.overall_accuracy);
    CHECK(r.average_accuracy == Catch::Approx(m.average_accuracy).epsilon(1e-14));
    CHECK(r.kappa == Catch::Approx(m.kappa).epsilon(1e-14));
    for (int c = 0; c < 4; ++c) {
      const double a = m.per_class_accuracy[static_cast<std::size_t>(c)];
      const double b = r.per_class_accuracy[static_cast<std::size_t>(perm[static_cast<std::size_t>(c)] - 1)];
      CHECK(((std::isnan(a) && std::isnan(b)) || a == b));
    }
  }
}

TEST_CASE("palette spaces hues evenly", "[eval][render]") {
  using Rgb = std::array<std::uint8_t, 3>;
  CHECK(palette_color(1, 2) == Rgb{255, 0, 0});
  CHECK(palette_color(2, 2) == Rgb{0, 255, 255});
  CHECK(palette_color(2, 3) == Rgb{0, 255, 0});
  CHECK(palette_color(3, 3) == Rgb{0, 0, 255});
  CHECK(palette_color(2, 4) == Rgb{128, 255, 0});
  CHECK(palette_color(4, 4) == Rgb{128, 0, 255});
}

TEST_CASE("class map renders as binary pixmap", "[eval][render]") {
  CHECK(render_map(std::vector<int>{1}, 1, 1, 3) == std::string("P6\n1 1\n255\n\xff\x00\x00", 14));
  CHECK(render_map(std::vector<int>{0, 0}, 1, 2, 3) == std::string("P6\n2 1\n255\n\0\0\0\0\0\0", 17));

  // 2 rows x 3 cols checkerboard of classes 1 and 2 out of 2.
  std::string fixture = "P6\n3 2\n255\n";
  const char red[] = {'\xff', '\x00', '\x00'};
  const char cyan[] = {'\x00', '\xff', '\xff'};
  for (int i = 0; i < 6; ++i) fixture.append(((i / 3 + i % 3) % 2 == 0) ? red : cyan, 3);
  CHECK(render_map(std::vector<int>{1, 2, 1, 2, 1, 2}, 2, 3, 2) == fixture);

  CHECK_THROWS_AS(render_map(std::vector<int>{3}, 1, 1, 2), RenderError);
  CHECK_THROWS_AS(render_map(std::vector<int>{-1}, 1, 1, 2), RenderError);
  CHECK_THROWS_AS(render_map(std::vector<int>{1, 1}, 1, 1, 2), ShapeError);
}
