#ifndef MLN_FUSION_HPP
#define MLN_FUSION_HPP

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mln/evidence.hpp"
#include "mln/tracklet.hpp"

namespace mln {

/// Whitening transform of the pooled in-class covariance,
/// W = (C + lambda I)^(-1/2). Distances taken after applying W define the
/// learned metric.
struct RcaModel {
  Eigen::MatrixXd transform;
  double lambda = 0.0;
  int dim = 0;
};

/// Fits the whitening transform from labeled points: C pools the squared
/// deviations from each class mean over all p points. lambda = 0 requires a
/// non-singular C.
RcaModel rcaFit(const std::vector<std::pair<Eigen::VectorXd, int>>& points,
                double lambda);
Eigen::VectorXd rcaTransform(const RcaModel& model, const Eigen::VectorXd& v);
/// Common default when no sweep value is given: 1e-3 * trace(C)/d.
double rcaDefaultLambda(
    const std::vector<std::pair<Eigen::VectorXd, int>>& points);

/// Peak-normalized Gaussian kernel: value 1 at the mean. Kernel outputs are
/// used directly as soft-evidence probabilities, so densities would not do.
struct GaussianKernelParams {
  double mean = 0.0;
  double sigma = 1.0;
};
double gaussianKernel(double x, const GaussianKernelParams& k);

/// Similarity of the temporal gap tStartB - tEndA under the kernel.
double temporalSimilarity(double tEndA, double tStartB,
                          const GaussianKernelParams& k);

struct Homography {
  Eigen::Matrix3d matrix = Eigen::Matrix3d::Identity();
  /// Projective application with division by the homogeneous coordinate;
  /// throws when the point maps to infinity.
  Eigen::Vector2d apply(const Eigen::Vector2d& p) const;
};

/// Similarity of the map-plane distance between two image locations after
/// projecting each through its sensor homography.
double spatialSimilarity(const Eigen::Vector2d& locA,
                         const Eigen::Vector2d& locB, const Homography& homogA,
                         const Homography& homogB,
                         const GaussianKernelParams& k);

double sizeSimilarity(const Eigen::Vector3d& sizeA, const Eigen::Vector3d& sizeB,
                      const GaussianKernelParams& k);

/// entry(i,j) = P(observed class j | true class i) for one sensor.
struct ConfusionMatrix {
  Eigen::MatrixXd p;
  int classes() const { return static_cast<int>(p.rows()); }
};

/// Joint probability of the two observations assuming classification in each
/// sensor is conditionally independent given the true class:
/// sum_k P(obsA|c_k) P(obsB|c_k) P(c_k).
double classSimilarity(int obsA, int obsB, const ConfusionMatrix& cmA,
                       const ConfusionMatrix& cmB, const Eigen::VectorXd& prior);

/// Population variance of the distances to the K nearest reference patches;
/// distances taken in RCA space when a model is supplied.
double saliencyScore(const Eigen::VectorXd& patch,
                     const std::vector<Eigen::VectorXd>& referencePatches,
                     int K, const RcaModel* model = nullptr);

/// Sum of |coefficients| in the first column of the RCA transform over the
/// coordinate block of one patch (stacked-descriptor layout).
double relevanceScore(const RcaModel& model, int patchIndex, int patchDim);

/// M x N grid of patch descriptors with per-patch saliency and relevance.
struct PatchGrid {
  int rows = 0;
  int cols = 0;
  int dim = 0;
  std::vector<Eigen::VectorXd> patches;  // row-major
  std::vector<double> saliency;          // defaults to 1
  std::vector<double> relevance;         // defaults to 1

  const Eigen::VectorXd& at(int r, int c) const {
    return patches.at(static_cast<size_t>(r) * cols + c);
  }
  double s(int r, int c) const {
    return saliency.at(static_cast<size_t>(r) * cols + c);
  }
  double rel(int r, int c) const {
    return relevance.at(static_cast<size_t>(r) * cols + c);
  }
};

/// Directional patch-matching score: each patch of P is matched with the
/// contribution-maximizing patch of Q within +-dx columns and +-dy rows;
/// contribution = S_P R_P d S_Q R_Q / (alpha + |S_P - S_Q|) with the patch
/// affinity d = exp(-|fP-fQ|^2 / (2 sigmaD^2)).
double appearanceSimilarity(const PatchGrid& gridP, const PatchGrid& gridQ,
                            double alpha, std::pair<int, int> searchWindow,
                            double sigmaD);

/// Fills grid.saliency from K-nearest-reference variance, normalized to
/// [0,1] by the maximum over the grid; fills grid.relevance from the RCA
/// first column when a model is given.
void computeGridSaliency(PatchGrid& grid,
                         const std::vector<Eigen::VectorXd>& referencePatches,
                         int K, const RcaModel* model = nullptr);
void computeGridRelevance(PatchGrid& grid, const RcaModel& model);

/// Mean of the K scores largest in |.| (signed average), passed through the
/// logistic 1/(1+exp(-(a s + b))).
double fuseAttributeScores(const std::vector<double>& scores, int K,
                           std::pair<double, double> logistic);

struct LogisticModel {
  double a = 1.0;
  double b = 0.0;
  bool magnitudeGuardHit = false;  // set for (near-)separable data

  double apply(double score) const;
};

/// Maximum-likelihood 2-parameter logistic fit by Newton iteration;
/// deterministic given data order. Requires both labels present.
LogisticModel fitLogisticCalibration(
    const std::vector<std::pair<double, int>>& labeled);

struct FusionParams {
  GaussianKernelParams temporal{0.0, 60.0};
  GaussianKernelParams spatial{0.0, 5.0};
  GaussianKernelParams size{0.0, 0.5};
  double alpha = 1.0;
  double sigmaD = 1.0;
  int K = 5;
  std::pair<int, int> searchWindow{2, 1};  // dx columns, dy rows
};

/// "key = value" lines, # or // comments.
std::map<std::string, std::string> parseKeyValueConfig(const std::string& text);
FusionParams fusionParamsFromConfig(
    const std::map<std::string, std::string>& config);

struct FusionModels {
  FusionParams params;
  std::optional<RcaModel> rca;
  std::map<std::string, Homography> homographies;      // by sensor id
  std::map<std::string, ConfusionMatrix> confusion;    // by sensor id
  Eigen::VectorXd classPrior;
  std::vector<std::string> classNames;  // confusion matrix class order
  LogisticModel appearanceCalibration;
};

/// Soft association evidence for one ordered cross-sensor tracklet pair:
/// temporallyClose, spatiallyClose, similarSize (both vehicles only),
/// similarClass and similarAppearance atoms over the two agent constants.
/// Cues whose model is missing are omitted with a warning. Probabilities are
/// clamped to [1e-6, 1-1e-6].
EvidenceSet emitSimilarityEvidence(const Tracklet& a, const Tracklet& b,
                                   const FusionModels& models,
                                   const KnowledgeBase& kb,
                                   std::vector<std::string>* warnings = nullptr);

/// Assembles fusion models from a key-value config: kernel parameters plus
/// classes = A,B; class_prior = p1,p2; homography.SENSOR = path;
/// confusion.SENSOR = path; appearance_a / appearance_b. readFile resolves
/// the referenced paths.
FusionModels loadFusionModels(
    const std::map<std::string, std::string>& config,
    const std::function<std::string(const std::string&)>& readFile);

/// CSV: N rows x N columns; an optional extra row is the class prior.
ConfusionMatrix loadConfusionMatrixCsv(const std::string& text,
                                       Eigen::VectorXd* prior = nullptr);
/// Nine reals, row major.
Homography loadHomography(const std::string& text);
/// Header "M,N,dim", then M*N rows of dim comma-separated values.
PatchGrid loadPatchGridCsv(const std::string& text);

}  // namespace mln

#endif
