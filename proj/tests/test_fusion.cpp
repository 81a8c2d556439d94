#include <cmath>
#include <random>

#include "doctest.h"
#include "mln/fusion.hpp"
#include "mln/parser.hpp"

using namespace mln;

namespace {

std::vector<std::pair<Eigen::VectorXd, int>> twoClassCloud(int perClass,
                                                           unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<std::pair<Eigen::VectorXd, int>> points;
  for (int cls = 0; cls < 2; ++cls) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
    mean[cls] = 4.0;
    for (int i = 0; i < perClass; ++i) {
      Eigen::VectorXd x = mean;
      x[0] += 1.5 * noise(rng);
      x[1] += 0.5 * noise(rng);
      x[2] += 0.1 * noise(rng);
      points.emplace_back(x, cls);
    }
  }
  return points;
}

}  // namespace

TEST_CASE("rcaFit on pre-whitened data is the identity") {
  // Four points per class arranged so the pooled in-class covariance is I.
  std::vector<std::pair<Eigen::VectorXd, int>> points;
  for (int cls = 0; cls < 2; ++cls) {
    double off = cls * 10.0;
    for (int s = -1; s <= 1; s += 2) {
      Eigen::VectorXd a(2);
      a << off + s * std::sqrt(2.0), off;
      points.emplace_back(a, cls);
      Eigen::VectorXd b(2);
      b << off, off + s * std::sqrt(2.0);
      points.emplace_back(b, cls);
    }
  }
  RcaModel model = rcaFit(points, 0.0);
  CHECK((model.transform - Eigen::MatrixXd::Identity(2, 2)).norm() ==
        doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("rcaFit with identical in-class points is pure regularization") {
  std::vector<std::pair<Eigen::VectorXd, int>> points;
  Eigen::VectorXd a(2);
  a << 1.0, 2.0;
  Eigen::VectorXd b(2);
  b << -3.0, 0.5;
  points.emplace_back(a, 0);
  points.emplace_back(a, 0);
  points.emplace_back(b, 1);
  points.emplace_back(b, 1);
  // C = 0, lambda = 0.25 -> transform = lambda^{-1/2} I = 2 I.
  RcaModel model = rcaFit(points, 0.25);
  CHECK((model.transform - 2.0 * Eigen::MatrixXd::Identity(2, 2)).norm() ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(rcaFit(points, 0.0), std::invalid_argument);
}

TEST_CASE("rcaFit matches a direct 2x2 eigendecomposition") {
  // Hand-built: two classes, deviations +-(1,1) and +-(2,-2) from the means.
  std::vector<std::pair<Eigen::VectorXd, int>> points;
  Eigen::VectorXd d1(2), d2(2);
  d1 << 1.0, 1.0;
  d2 << 2.0, -2.0;
  for (int s = -1; s <= 1; s += 2) {
    points.emplace_back(s * d1, 0);
    points.emplace_back(Eigen::VectorXd(100 * Eigen::VectorXd::Ones(2) + s * d2),
                        1);
  }
  double lambda = 0.3;
  RcaModel model = rcaFit(points, lambda);
  // C = (2*d1 d1^T + 2*d2 d2^T)/4 has eigenvectors (1,1)/sqrt2, (1,-1)/sqrt2
  // with eigenvalues 1 and 4.
  Eigen::Vector2d u(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  Eigen::Vector2d v(1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0));
  Eigen::Matrix2d expected = u * u.transpose() / std::sqrt(1.0 + lambda) +
                             v * v.transpose() / std::sqrt(4.0 + lambda);
  CHECK((model.transform - expected).norm() ==
        doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("rcaTransform applies the matrix and whitens training data") {
  RcaModel ident{Eigen::MatrixXd::Identity(2, 2), 0.0, 2};
  Eigen::VectorXd v(2);
  v << 1.0, 0.0;
  CHECK((rcaTransform(ident, v) - v).norm() == doctest::Approx(0.0));

  RcaModel twice{2.0 * Eigen::MatrixXd::Identity(2, 2), 0.0, 2};
  CHECK(rcaTransform(twice, v)[0] == doctest::Approx(2.0));

  // Post-transform in-class covariance is the identity (lambda = 0).
  auto points = twoClassCloud(200, 99);
  RcaModel model = rcaFit(points, 0.0);
  std::map<int, std::pair<Eigen::VectorXd, int>> sums;
  for (auto& [x, c] : points) {
    auto it = sums.find(c);
    if (it == sums.end())
      sums.emplace(c, std::make_pair(x, 1));
    else {
      it->second.first += x;
      it->second.second += 1;
    }
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(3, 3);
  for (auto& [x, c] : points) {
    Eigen::VectorXd centered = rcaTransform(
        model, x - sums.at(c).first / sums.at(c).second);
    cov += centered * centered.transpose();
  }
  cov /= static_cast<double>(points.size());
  CHECK((cov - Eigen::MatrixXd::Identity(3, 3)).norm() ==
        doctest::Approx(0.0).epsilon(1e-6).scale(1.0));
}

TEST_CASE("temporal kernel peaks at the mean and flattens with sigma") {
  GaussianKernelParams k{30.0, 10.0};
  CHECK(temporalSimilarity(0.0, 30.0, k) == doctest::Approx(1.0));
  CHECK(temporalSimilarity(0.0, 40.0, k) ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  GaussianKernelParams wider{30.0, 20.0};
  CHECK(temporalSimilarity(0.0, 60.0, wider) >
        temporalSimilarity(0.0, 60.0, k));
  // negative gaps (overlap) score under the same kernel
  CHECK(temporalSimilarity(10.0, 0.0, k) > 0.0);
}

TEST_CASE("spatial similarity projects through homographies") {
  Homography ident;
  GaussianKernelParams k{0.0, 5.0};
  Eigen::Vector2d p(3.0, 4.0);
  CHECK(spatialSimilarity(p, p, ident, ident, k) == doctest::Approx(1.0));

  Eigen::Vector2d q(3.0, 9.0);  // distance 5 = sigma
  CHECK(spatialSimilarity(p, q, ident, ident, k) ==
        doctest::Approx(std::exp(-0.5)));

  Homography h;
  h.matrix << 2.0, 0.0, 1.0, 0.0, 1.0, -3.0, 0.0, 0.0, 0.5;
  Eigen::Vector2d mapped = h.apply(Eigen::Vector2d(10.0, 20.0));
  // (2*10+1, 20-3, 0.5) -> (42, 34)
  CHECK(mapped.x() == doctest::Approx(42.0).epsilon(1e-12));
  CHECK(mapped.y() == doctest::Approx(34.0).epsilon(1e-12));

  Homography toInfinity;
  toInfinity.matrix << 1, 0, 0, 0, 1, 0, 1, 0, 0;
  CHECK_THROWS_AS(toInfinity.apply(Eigen::Vector2d(0.0, 5.0)),
                  std::domain_error);
}

TEST_CASE("size similarity is symmetric and kernel-shaped") {
  GaussianKernelParams k{0.0, 0.5};
  Eigen::Vector3d a(4.5, 1.8, 1.5);
  CHECK(sizeSimilarity(a, a, k) == doctest::Approx(1.0));
  Eigen::Vector3d b = a + Eigen::Vector3d(0.5, 0.0, 0.0);
  CHECK(sizeSimilarity(a, b, k) == doctest::Approx(std::exp(-0.5)));
  CHECK(sizeSimilarity(a, b, k) == doctest::Approx(sizeSimilarity(b, a, k)));
}

TEST_CASE("class similarity from confusion matrices") {
  ConfusionMatrix ident;
  ident.p = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(2, 0.5);

  CHECK(classSimilarity(0, 0, ident, ident, uniform) == doctest::Approx(0.5));
  CHECK(classSimilarity(0, 1, ident, ident, uniform) == doctest::Approx(0.0));

  ConfusionMatrix noisy;
  noisy.p.resize(2, 2);
  noisy.p << 0.9, 0.1, 0.2, 0.8;
  CHECK(classSimilarity(0, 0, noisy, ident, uniform) == doctest::Approx(0.45));
  // symmetric under swapping (obs, matrix) pairs
  CHECK(classSimilarity(0, 1, noisy, ident, uniform) ==
        doctest::Approx(classSimilarity(1, 0, ident, noisy, uniform)));
  CHECK_THROWS_AS(classSimilarity(2, 0, ident, ident, uniform),
                  std::out_of_range);
}

TEST_CASE("class similarity sums over obsB to the marginal of obsA") {
  ConfusionMatrix cmA, cmB;
  cmA.p.resize(2, 2);
  cmA.p << 0.7, 0.3, 0.25, 0.75;
  cmB.p.resize(2, 2);
  cmB.p << 0.6, 0.4, 0.1, 0.9;
  Eigen::VectorXd prior(2);
  prior << 0.3, 0.7;
  for (int obsA = 0; obsA < 2; ++obsA) {
    double total = 0.0;
    for (int obsB = 0; obsB < 2; ++obsB)
      total += classSimilarity(obsA, obsB, cmA, cmB, prior);
    double marginal = prior[0] * cmA.p(0, obsA) + prior[1] * cmA.p(1, obsA);
    CHECK(total == doctest::Approx(marginal).epsilon(1e-12));
  }
}

TEST_CASE("saliency from K-nearest reference distances") {
  Eigen::VectorXd p(1);
  p << 0.0;
  std::vector<Eigen::VectorXd> refs;
  for (double d : {1.0, 2.0, 3.0}) {
    Eigen::VectorXd r(1);
    r << d;
    refs.push_back(r);
  }
  // distances {1,2,3}: population variance 2/3
  CHECK(saliencyScore(p, refs, 3) == doctest::Approx(2.0 / 3.0));
  CHECK(saliencyScore(p, refs, 1) == doctest::Approx(0.0));

  std::vector<Eigen::VectorXd> same(4, p);
  CHECK(saliencyScore(p, same, 4) == doctest::Approx(0.0));
  CHECK_THROWS_AS(saliencyScore(p, refs, 4), std::invalid_argument);
}

TEST_CASE("relevance sums first-column coefficients per patch block") {
  RcaModel ident{Eigen::MatrixXd::Identity(4, 4), 0.0, 4};
  CHECK(relevanceScore(ident, 0, 2) == doctest::Approx(1.0));
  CHECK(relevanceScore(ident, 1, 2) == doctest::Approx(0.0));

  RcaModel half{Eigen::MatrixXd::Identity(8, 8), 0.0, 8};
  half.transform.col(0).setConstant(0.5);
  CHECK(relevanceScore(half, 1, 4) == doctest::Approx(2.0));

  RcaModel hand{Eigen::MatrixXd::Zero(4, 4), 0.0, 4};
  hand.transform.col(0) << 0.1, -0.2, 0.3, -0.4;
  CHECK(relevanceScore(hand, 0, 2) == doctest::Approx(0.3));
  CHECK(relevanceScore(hand, 1, 2) == doctest::Approx(0.7));
  CHECK_THROWS_AS(relevanceScore(hand, 2, 2), std::out_of_range);
}

namespace {

PatchGrid makeGrid(int rows, int cols, int dim, double fill) {
  PatchGrid g;
  g.rows = rows;
  g.cols = cols;
  g.dim = dim;
  for (int i = 0; i < rows * cols; ++i)
    g.patches.push_back(Eigen::VectorXd::Constant(dim, fill));
  g.saliency.assign(rows * cols, 1.0);
  g.relevance.assign(rows * cols, 1.0);
  return g;
}

}  // namespace

TEST_CASE("appearance similarity of identical unit grids is M/alpha") {
  PatchGrid g = makeGrid(2, 3, 4, 0.7);
  double alpha = 2.0;
  CHECK(appearanceSimilarity(g, g, alpha, {1, 1}, 1.0) ==
        doctest::Approx(6.0 / alpha));
}

TEST_CASE("zero relevance kills the appearance score") {
  PatchGrid g = makeGrid(2, 2, 3, 0.5);
  PatchGrid q = g;
  for (double& r : g.relevance) r = 0.0;
  CHECK(appearanceSimilarity(g, q, 1.0, {1, 1}, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("appearance matching agrees with brute force on a 2x2 case") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  PatchGrid p = makeGrid(2, 2, 3, 0.0);
  PatchGrid q = makeGrid(2, 2, 3, 0.0);
  for (auto* grid : {&p, &q})
    for (int i = 0; i < 4; ++i) {
      for (int d = 0; d < 3; ++d) grid->patches[i][d] = uni(rng);
      grid->saliency[i] = uni(rng);
      grid->relevance[i] = uni(rng);
    }
  double alpha = 0.7, sigmaD = 0.9;
  int dx = 1, dy = 0;

  double expected = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      double best = 0.0;
      for (int rq = 0; rq < 2; ++rq)
        for (int cq = 0; cq < 2; ++cq) {
          if (std::abs(rq - r) > dy || std::abs(cq - c) > dx) continue;
          double d = std::exp(-(p.at(r, c) - q.at(rq, cq)).squaredNorm() /
                              (2 * sigmaD * sigmaD));
          double term = p.s(r, c) * p.rel(r, c) * d * q.s(rq, cq) *
                        q.rel(rq, cq) /
                        (alpha + std::abs(p.s(r, c) - q.s(rq, cq)));
          best = std::max(best, term);
        }
      expected += best;
    }
  CHECK(appearanceSimilarity(p, q, alpha, {dx, dy}, sigmaD) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("appearance similarity is monotone in a patch affinity") {
  PatchGrid p = makeGrid(1, 2, 2, 0.0);
  PatchGrid q = makeGrid(1, 2, 2, 1.0);
  double before = appearanceSimilarity(p, q, 1.0, {1, 0}, 1.0);
  // Move one q patch closer to p's: d rises, all else fixed.
  q.patches[0] = Eigen::VectorXd::Constant(2, 0.2);
  double after = appearanceSimilarity(p, q, 1.0, {1, 0}, 1.0);
  CHECK(after >= before);
}

TEST_CASE("fuseAttributeScores picks by absolute value and calibrates") {
  // K=1 over {-3, 2}: |-3| wins; sigmoid(-3) = 1/(1+e^3).
  CHECK(fuseAttributeScores({-3.0, 2.0}, 1, {1.0, 0.0}) ==
        doctest::Approx(1.0 / (1.0 + std::exp(3.0))).epsilon(1e-6));
  CHECK(fuseAttributeScores({-3.0, 2.0}, 1, {1.0, 0.0}) ==
        doctest::Approx(0.04743).epsilon(1e-3));
  CHECK(fuseAttributeScores({0.0}, 1, {1.0, 0.0}) == doctest::Approx(0.5));
  // K beyond the list length: plain mean.
  CHECK(fuseAttributeScores({1.0, 2.0, 3.0}, 10, {1.0, 0.0}) ==
        doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
  CHECK_THROWS_AS(fuseAttributeScores({}, 1, {1.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("logistic calibration") {
  SUBCASE("symmetric data gives b near zero") {
    std::vector<std::pair<double, int>> data;
    for (int i = 0; i < 50; ++i) {
      data.emplace_back(1.0, i < 40 ? 1 : 0);
      data.emplace_back(-1.0, i < 40 ? 0 : 1);
    }
    LogisticModel m = fitLogisticCalibration(data);
    CHECK(std::abs(m.b) < 1e-3);
    CHECK(m.a > 0.0);
  }
  SUBCASE("labels independent of score give a near zero") {
    std::vector<std::pair<double, int>> data;
    for (int i = 0; i < 100; ++i)
      data.emplace_back((i % 5) - 2.0, (i / 5) % 2);
    LogisticModel m = fitLogisticCalibration(data);
    CHECK(std::abs(m.a) < 1e-2);
  }
  SUBCASE("fit beats the (1,0) baseline in likelihood") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    std::vector<std::pair<double, int>> data;
    for (int i = 0; i < 60; ++i) {
      double s = uni(rng);
      int y = (3.0 * s - 1.0 + uni(rng)) > 0 ? 1 : 0;
      data.emplace_back(s, y);
    }
    LogisticModel m = fitLogisticCalibration(data);
    auto nll = [&](double a, double b) {
      double v = 0.0;
      for (auto& [s, y] : data) {
        double p = 1.0 / (1.0 + std::exp(-(a * s + b)));
        p = std::min(1.0 - 1e-12, std::max(1e-12, p));
        v -= y ? std::log(p) : std::log(1.0 - p);
      }
      return v;
    };
    CHECK(nll(m.a, m.b) < nll(1.0, 0.0));
  }
  SUBCASE("separable data stops at the magnitude guard") {
    std::vector<std::pair<double, int>> data;
    for (int i = 0; i < 20; ++i) data.emplace_back(i < 10 ? -1.0 : 1.0, i < 10 ? 0 : 1);
    LogisticModel m = fitLogisticCalibration(data);
    CHECK(m.magnitudeGuardHit);
  }
  SUBCASE("single-label data is rejected") {
    CHECK_THROWS_AS(fitLogisticCalibration({{1.0, 1}, {2.0, 1}}),
                    std::invalid_argument);
  }
}

TEST_CASE("kernel scores live in (0,1] and peak at the mean") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> uni(-50.0, 50.0);
  std::uniform_real_distribution<double> dev(-8.0, 8.0);
  for (int i = 0; i < 200; ++i) {
    GaussianKernelParams k{uni(rng), std::abs(uni(rng)) + 0.1};
    double x = k.mean + dev(rng) * k.sigma;
    double v = gaussianKernel(x, k);
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
    // strictly decreasing in |deviation|
    double closer = k.mean + 0.5 * (x - k.mean);
    CHECK(gaussianKernel(closer, k) >= v);
  }
}

TEST_CASE("emitSimilarityEvidence covers the cue set") {
  KnowledgeBase kb = parseKb(
      "*temporallyClose(agent, agent)\n"
      "*spatiallyClose(agent, agent)\n"
      "*similarSize(agent, agent)\n"
      "*similarClass(agent, agent)\n"
      "*similarAppearance(agent, agent)\n"
      "equalAgent(agent, agent)\n");

  FusionModels models;
  models.params.temporal = {10.0, 20.0};
  models.params.spatial = {0.0, 5.0};
  models.params.size = {0.0, 0.5};
  models.homographies["S1"] = Homography{};
  models.homographies["S2"] = Homography{};
  ConfusionMatrix cm;
  cm.p.resize(2, 2);
  cm.p << 0.95, 0.05, 0.05, 0.95;
  models.confusion["S1"] = cm;
  models.confusion["S2"] = cm;
  models.classPrior = Eigen::VectorXd(2);
  models.classPrior << 0.2, 0.8;  // vehicle-heavy scene
  models.classNames = {"HUMAN", "VEHICLE"};

  Tracklet a;
  a.sensorId = "S1";
  a.trackId = "T1";
  a.tStart = 0;
  a.tEnd = 100;
  a.trajectory = {{0, 0, 0}, {100, 10, 0}};
  a.categoryScores = {{"HUMAN", 0.1}, {"VEHICLE", 0.9}};
  a.size = Eigen::Vector3d(4.5, 1.8, 1.5);
  auto grid = std::make_shared<PatchGrid>(makeGrid(1, 1, 2, 0.5));
  a.appearance = grid;

  Tracklet b = a;
  b.sensorId = "S2";
  b.trackId = "T7";
  b.tStart = 110;
  b.tEnd = 200;
  b.trajectory = {{110, 10, 1}, {200, 20, 1}};

  SUBCASE("co-located contiguous same-class pair scores high everywhere") {
    std::vector<std::string> warnings;
    EvidenceSet ev = emitSimilarityEvidence(a, b, models, kb, &warnings);
    CHECK(ev.size() == 5);
    for (const EvidenceRecord& rec : ev) {
      CHECK(rec.truth == EvidenceRecord::Truth::Soft);
      CHECK(rec.p > 0.5);
    }
    CHECK(warnings.empty());
  }
  SUBCASE("human pair omits the size cue") {
    Tracklet ha = a, hb = b;
    ha.categoryScores = {{"HUMAN", 0.9}, {"VEHICLE", 0.1}};
    hb.categoryScores = ha.categoryScores;
    EvidenceSet ev = emitSimilarityEvidence(ha, hb, models, kb);
    for (const EvidenceRecord& rec : ev)
      CHECK(kb.schema(rec.atom.predicate).name != "similarSize");
  }
  SUBCASE("scores at the kernel peak are clamped below 1") {
    Tracklet pa = a, pb = b;
    pb.tStart = pa.tEnd + 10.0;  // exactly the temporal mean
    EvidenceSet ev = emitSimilarityEvidence(pa, pb, models, kb);
    CHECK(ev[0].p == doctest::Approx(1.0 - 1e-6));
  }
  SUBCASE("missing homography omits the spatial cue with a warning") {
    FusionModels m2 = models;
    m2.homographies.clear();
    std::vector<std::string> warnings;
    EvidenceSet ev = emitSimilarityEvidence(a, b, m2, kb, &warnings);
    CHECK(ev.size() == 4);
    CHECK(!warnings.empty());
  }
  SUBCASE("same sensor is rejected") {
    CHECK_THROWS_AS(emitSimilarityEvidence(a, a, models, kb),
                    std::invalid_argument);
  }
}

TEST_CASE("model file loaders") {
  SUBCASE("confusion matrix with prior row") {
    Eigen::VectorXd prior;
    ConfusionMatrix cm = loadConfusionMatrixCsv(
        "0.9,0.1\n0.2,0.8\n0.4,0.6\n", &prior);
    CHECK(cm.p(0, 0) == doctest::Approx(0.9));
    CHECK(prior[1] == doctest::Approx(0.6));
    CHECK_THROWS_AS(loadConfusionMatrixCsv("0.9,0.3\n0.2,0.8\n"),
                    std::invalid_argument);
  }
  SUBCASE("homography") {
    Homography h = loadHomography("1 0 2\n0 1 -1\n0 0 1\n");
    CHECK(h.apply(Eigen::Vector2d(0, 0)).x() == doctest::Approx(2.0));
    CHECK_THROWS_AS(loadHomography("1 0 0 0 1 0 0 0 0"),
                    std::invalid_argument);
  }
  SUBCASE("patch grid csv") {
    PatchGrid g = loadPatchGridCsv("1,2,3\n0.1,0.2,0.3\n0.4,0.5,0.6\n");
    CHECK(g.rows == 1);
    CHECK(g.cols == 2);
    CHECK(g.at(0, 1)[2] == doctest::Approx(0.6));
  }
  SUBCASE("fusion params from key-value text") {
    auto cfg = parseKeyValueConfig(
        "m_t = 40\nsigma_t = 15\n# comment\nalpha = 0.5\nK = 3\n");
    FusionParams p = fusionParamsFromConfig(cfg);
    CHECK(p.temporal.mean == doctest::Approx(40.0));
    CHECK(p.temporal.sigma == doctest::Approx(15.0));
    CHECK(p.alpha == doctest::Approx(0.5));
    CHECK(p.K == 3);
  }
}
