#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "molecuforge/workspace.hpp"

namespace molecuforge {

inline constexpr std::string_view kFormatName = "molecusense";
inline constexpr int kFormatVersion = 1;

/// Deterministic version-1 XML document. Throws InvalidWorkspace when
/// validate(ws) is not empty.
std::string save_xml(const Workspace& ws);

/// Parses a version-1 document. Anchor and grab start cleared.
/// Throws ParseError, SchemaError or ConsistencyError.
Workspace load_xml(std::string_view document);

std::string export_xyz(const Workspace& ws);

std::string read_file(const std::filesystem::path& path);   // FileNotFound / IoError
void write_file(const std::filesystem::path& path, std::string_view bytes);  // IoError

}  // namespace molecuforge
