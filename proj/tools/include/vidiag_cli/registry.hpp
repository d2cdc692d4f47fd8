#ifndef VIDIAG_CLI_REGISTRY_HPP
#define VIDIAG_CLI_REGISTRY_HPP

#include <memory>
#include <string>
#include <vector>

#include "vidiag/models.hpp"
#include "vidiag_cli/run_config.hpp"

namespace vidiag::cli {

/// Names accepted by --model.
std::vector<std::string> model_names();

/// Builds the named model. Synthetic data come from the run's data stream;
/// regression models read cfg.data instead when it is set. Throws
/// InvalidParameter for unknown names or option keys.
std::unique_ptr<Model> make_model(const RunConfig& cfg);

}  // namespace vidiag::cli

#endif
