#pragma once

#include <stdexcept>
#include <string>

namespace tis {

/// Invalid geometric construction (self-intersection, degenerate facet, ...).
class GeometryError : public std::runtime_error {
public:
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// Assembly-level inconsistency (interface mismatch, initial penetration).
class AssemblyError : public std::runtime_error {
public:
  explicit AssemblyError(const std::string& what) : std::runtime_error(what) {}
};

/// Requested symmetry reduction is not admissible for this morphology.
class SymmetryError : public std::runtime_error {
public:
  explicit SymmetryError(const std::string& what) : std::runtime_error(what) {}
};

/// Mesh generation failure (inverted cell, empty input).
class MeshError : public std::runtime_error {
public:
  explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration parse/validation failure; carries the offending key path.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& key_path, const std::string& what)
      : std::runtime_error(key_path + ": " + what), key_path_(key_path) {}
  const std::string& key_path() const { return key_path_; }

private:
  std::string key_path_;
};

}  // namespace tis
