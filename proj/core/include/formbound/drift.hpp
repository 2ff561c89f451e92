#pragma once

#include <optional>
#include <string>
#include <vector>

#include "formbound/field.hpp"
#include "formbound/products.hpp"

namespace formbound {

/// Mollification level: cutoff is the paper-style level n (radius around the
/// box center and height cap applied as an indicator), epsilon the heat
/// width. cutoff <= 0 disables the indicator.
struct Mollification {
    double cutoff = 0.0;
    double epsilon = 0.0;
};

enum class DriftKind { hardy, smooth_trig, file };

struct DriftSpec {
    std::string name = "drift";
    DriftKind kind = DriftKind::hardy;
    double c = 0.2;                  // hardy strength
    double amplitude = 0.5;          // smooth-trig amplitude
    std::vector<std::string> paths;  // file kind: one FBND1 file per component
    double lambda = 1.0;
    Mollification mollification;
    std::optional<double> delta_claimed;  // overrides the kind-specific default
};

/// A drift field together with its shift lambda and claimed form bound.
struct DriftField {
    std::string name;
    VectorField b;
    ScalarField speed;  // |b|, cached
    double lambda = 1.0;
    double delta_claimed = 0.0;
};

DriftField make_drift(const GridPtr& grid, const DriftSpec& spec);

/// b(x) = c (x - x0)/|x - x0|^2 with the singular point offset half a cell
/// from the box center, truncated and mollified per spec; delta_claimed is
/// the Hardy constant 4 c^2/(d-2)^2.
DriftField make_hardy_drift(const GridPtr& grid, double c, const DriftSpec& spec);

DriftField make_smooth_trig_drift(const GridPtr& grid, double amplitude,
                                  const DriftSpec& spec);

DriftField load_drift(const GridPtr& grid, const DriftSpec& spec);

/// Zero the field outside {|x - center| <= cutoff, |b(x)| <= cutoff}, then
/// heat-smooth componentwise.
VectorField mollify_drift(const VectorField& raw, double cutoff, double epsilon);

/// b_pow = |b|^{2/p-1} b (zero where b = 0), b_comp = |b|^{1-2/p}.
struct DriftPowers {
    VectorField b_pow;
    ScalarField b_comp;
};
DriftPowers drift_power(const DriftField& drift, double p);

}  // namespace formbound
