#pragma once
/*
 * Simulator configuration files.
 *
 * Plain-text key/value format with bracketed sections:
 *
 *   [trial]
 *   n_packets = 1000000
 *   period_us = 10000
 *
 *   [channel.a]
 *   service = multicast
 *   error_prob = 0.01
 *   tail = exponential
 *   tail_mean_us = 150
 *
 *   [channel.b.gilbert_elliott]
 *   p_good_to_bad = 0.02
 *   p_bad_to_good = 0.3
 *
 *   [interferer.1]
 *   preset = beacon
 *   scope = both
 *   coupling = 0.5
 *
 * Every field is optional and falls back to the built-in default.  '#' or ';'
 * starts a comment.  Unknown sections or keys are errors, as are keys that do
 * not belong to the declared service/tail/interferer kind.  Interferer
 * sections are numbered from 1; a preset (beacon, lab5ghz) is applied first
 * and explicit keys then override individual fields.
 */

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "redlink/sim.hpp"

namespace redlink {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses configuration text.  Throws ConfigError with a line reference.
SimConfig parse_sim_config(std::istream& in);

/// Loads and parses a configuration file.
SimConfig load_sim_config(const std::string& path);

} // namespace redlink
