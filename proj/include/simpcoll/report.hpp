#pragma once

#include <string>

#include "simpcoll/assoc.hpp"
#include "simpcoll/collapse.hpp"
#include "simpcoll/depfun.hpp"
#include "simpcoll/io.hpp"
#include "simpcoll/paradox.hpp"
#include "simpcoll/regress.hpp"
#include "simpcoll/survival.hpp"

namespace simpcoll::report {

using io::json;

/// Deterministic rendering: object keys sorted, floats with 17 significant
/// digits, two-space indentation, trailing newline.
std::string canonical_dump(const json& j);

/// {"value": x} for doubles, {"exact": "p/q", "value": x} for rationals.
json scalar(double x);
json scalar(const Rational& x);

json subset(const CategoricalScheme& scheme, VarSet s);

json to_json(const CiVerdict& v, const CategoricalScheme& scheme);
json to_json(const HierarchyCheck& h, const CategoricalScheme& scheme);
json to_json(const CollapseVerdict& v, const CategoricalScheme& scheme);
json to_json(const StrictCollapseVerdict& v, const CategoricalScheme& scheme);

template <class Scalar>
json to_json(const ParadoxReport<Scalar>& rep);
template <class Scalar>
json to_json(const CornfieldDiagnostics<Scalar>& d);

json to_json(const RelationCheck& r);
json to_json(const LinkageProfile& p);
json to_json(const AssocReversal& r);
json to_json(const LinearR4Report& r);

json to_json(const RegressVerdict& v);
json to_json(const SufficientConditions& s);

json to_json(const HomogeneityResult& h);
json to_json(const DepVerdict& v);

json to_json(const SurvivalVerdict& v);

/// Markdown rendering of a full report object ({"verb", "result", ...}).
std::string render_markdown(const json& report);

}  // namespace simpcoll::report
