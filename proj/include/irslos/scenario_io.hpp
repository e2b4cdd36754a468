#pragma once

#include <stdexcept>
#include <string>

#include "irslos/scenario.hpp"

namespace irslos {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flat `section.key_unit = value` text; `#` starts a comment. Angle values accept
// products and quotients with `pi`, e.g. `7*pi/6`.
Scenario parse_scenario_text(const std::string& text, const std::string& origin = "<text>");
Scenario parse_scenario(const std::string& path);
// Keys of the overlay replace those of the base before validation.
Scenario parse_scenario_with_overlay(const std::string& base_path, const std::string& overlay_path);
Scenario parse_scenario_text_with_overlay(const std::string& base, const std::string& overlay);

// Canonical text of every key; parsing it back yields an identical scenario.
std::string serialize_scenario(const Scenario& s);
std::string scenario_hash(const Scenario& s);

// Overlay text holding the orientation and explicit focusing of `s`.
std::string orientation_overlay(const Scenario& s);

double parse_value(const std::string& text);

}  // namespace irslos
