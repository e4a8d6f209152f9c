#pragma once

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "bro/models.hpp"
#include "bro/posterior.hpp"
#include "bro/risk.hpp"
#include "bro/schedules.hpp"

namespace bro::cli {

using nlohmann::json;

/// Raised for any missing or out-of-range configuration field; the message
/// names the offending field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_config(const std::filesystem::path& path);

const json& require_section(const json& j, const std::string& key, const std::string& where);
double require_number(const json& j, const std::string& key, const std::string& where, double lo,
                      double hi);
double optional_number(const json& j, const std::string& key, const std::string& where, double lo,
                       double hi, double fallback);
long require_integer(const json& j, const std::string& key, const std::string& where, long lo,
                     long hi);
long optional_integer(const json& j, const std::string& key, const std::string& where, long lo,
                      long hi, long fallback);
std::string require_string(const json& j, const std::string& key, const std::string& where);

RiskSpec parse_risk(const json& j, const std::string& where);
std::unique_ptr<SimulationModel> parse_model(const json& j, const std::string& where);
std::unique_ptr<PosteriorSampler> parse_posterior(const json& j, const std::string& where);
StepSchedule parse_step_schedule(const json& j, const std::string& where);
BudgetSchedule parse_budget_schedule(const json& j, const std::string& where);
MCMCConfig parse_mcmc(const json& j, const std::string& where);

}  // namespace bro::cli
