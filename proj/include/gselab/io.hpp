#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "gselab/core.hpp"
#include "gselab/csp.hpp"
#include "gselab/graphon.hpp"

namespace gselab {

// Instance file contents. `kind` selects which payload is present; an
// interaction block may accompany array-like kinds.
struct Instance {
    std::string kind;
    std::optional<RArray> rarray;
    std::optional<StepKernel> kernel;
    std::optional<FullStepGraphon> graphon;
    std::optional<Formula> formula;
    std::optional<LayeredRArray> layered;
    std::optional<LayeredInteraction> interaction;

    double inf_norm() const;
};

Instance parse_instance(const nlohmann::json& j);
Instance load_instance(const std::string& path);

nlohmann::json rarray_to_json(const RArray& a);
nlohmann::json kernel_to_json(const StepKernel& w);
nlohmann::json layered_to_json(const LayeredRArray& w);

// Canonical serialization: keys sorted (nlohmann objects already order by
// key), floats rendered with %.17g, newline-terminated. Byte output depends
// only on the value, so identical configs rewrite identical files.
std::string canonical_dump(const nlohmann::json& j);
void write_result(const std::string& path, const nlohmann::json& j);

} // namespace gselab
