#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bff/bvp.h"
#include "bff/mesh.h"
#include "bff/sparse.h"

namespace bff {

enum class ExtensionKind {
    Holomorphic, // harmonic real part plus its discrete conjugate
    Harmonic,    // both coordinates interpolate the boundary curve
};

const char* extensionKindName(ExtensionKind kind);

inline constexpr double kAngleSumTolerance = 1e-9;

/// Boundary data for a flattening: log scale factors u or target exterior
/// angles, one per boundary vertex in loop order. `mode` says which one the
/// caller supplied; completion fills in the other.
struct BoundaryConditions {
    enum class Mode { ScaleFactors, ExteriorAngles };

    Mode mode = Mode::ScaleFactors;
    Eigen::VectorXd scaleFactors;
    Eigen::VectorXd exteriorAngles;
    ExtensionKind extension = ExtensionKind::Holomorphic;

    static BoundaryConditions withScaleFactors(Eigen::VectorXd u,
                                               ExtensionKind extension = ExtensionKind::Holomorphic);
    static BoundaryConditions withExteriorAngles(Eigen::VectorXd angles,
                                                 ExtensionKind extension = ExtensionKind::Holomorphic);
};

/// Closed target polygon. Edge i runs from boundary vertex i to i + 1 and is
/// parallel to tangents.col(i); vertex 0 sits at the origin and edge 0 points
/// along +x.
struct BoundaryCurve {
    Eigen::VectorXd cumulativeAngles;
    Eigen::Matrix2Xd tangents;
    Eigen::VectorXd targetLengths;
    Eigen::VectorXd adjustedLengths;
    Eigen::Matrix2Xd positions;
};

using PlanarMap = Eigen::Matrix<double, Eigen::Dynamic, 2>;

struct Flattening {
    PlanarMap uv;
    BoundaryConditions boundaryData;
    BoundaryCurve curve;
    std::string method;
    int iterations = 0;
    // Per-iteration convergence measure for the iterative drivers, and the
    // total exterior angle they prescribed at each iteration.
    std::vector<double> history;
    std::vector<double> turning;
};

// Throws AngleSumViolation unless the angles sum to 2*pi within tolerance.
void checkAngleSum(const Eigen::VectorXd& angles, double tolerance = kAngleSumTolerance);

/// Fills in the complementary boundary data through the discrete Cherrier
/// relation, with target curvature zero away from `angleDefect`:
///   given u:       k~ = k - DtN(u)
///   given angles:  u  = NtD(k - k~)
/// `angleDefect` is per vertex and `exteriorAngles` (k) is per boundary vertex.
BoundaryConditions completeBoundaryData(const FactoredLaplace& factor, const CotanMatrix& matrix,
                                        const Eigen::VectorXd& angleDefect,
                                        const Eigen::VectorXd& exteriorAngles,
                                        BoundaryConditions conditions);

// l~_ij = exp((u_i + u_j) / 2) l_ij along each boundary edge.
Eigen::VectorXd targetLengths(const DiskMesh& mesh, const Eigen::VectorXd& scaleFactors);

/// Closed polygon with exactly the given exterior angles whose edge lengths
/// are the nearest to `targetLengths` in the norm weighted by 1/dualLengths.
///
/// When `edgePartner` is non-empty, partnered edges share a single length
/// unknown, so both sides of a seam come out identical.
BoundaryCurve bestFitCurve(const Eigen::VectorXd& targetLengths, const Eigen::VectorXd& exteriorAngles,
                           const Eigen::VectorXd& dualLengths, std::span<const int> edgePartner = {});

BoundaryCurve bestFitCurve(const DiskMesh& mesh, const Eigen::VectorXd& targetLengths,
                           const Eigen::VectorXd& exteriorAngles);

/// Extends boundary positions (one column per boundary vertex, loop order)
/// over the interior.
PlanarMap extendCurve(const FactoredLaplace& factor, const CotanMatrix& matrix,
                      const Eigen::Matrix2Xd& boundaryPositions, ExtensionKind kind);

/// Precomputed state for flattening one disk: angles, curvatures, the cotan
/// matrix and its single factorization. Every flatten() call afterwards costs
/// three backsolves plus O(|B|) work.
class Flattener {
public:
    // edgePartner pairs seam edges of a cut surface; see bestFitCurve.
    explicit Flattener(std::shared_ptr<const DiskMesh> mesh, std::vector<int> edgePartner = {});

    const DiskMesh& mesh() const { return *mesh_; }
    std::shared_ptr<const DiskMesh> meshPtr() const { return mesh_; }
    const CornerAngles& angles() const { return angles_; }
    const DiscreteCurvatures& curvatures() const { return curvatures_; }
    // k in boundary loop order.
    const Eigen::VectorXd& boundaryCurvature() const { return boundaryCurvature_; }
    const CotanMatrix& laplace() const { return laplace_; }
    const FactoredLaplace& factor() const { return *factor_; }
    std::span<const int> edgePartner() const { return edgePartner_; }

    BoundaryConditions complete(const BoundaryConditions& conditions) const;
    Flattening flatten(const BoundaryConditions& conditions) const;

private:
    std::shared_ptr<const DiskMesh> mesh_;
    std::vector<int> edgePartner_;
    CornerAngles angles_;
    DiscreteCurvatures curvatures_;
    Eigen::VectorXd boundaryCurvature_;
    CotanMatrix laplace_;
    std::shared_ptr<const FactoredLaplace> factor_;
};

} // namespace bff
