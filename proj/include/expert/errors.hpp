#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace expert {

/// Base of every error raised by the engine. The CLI maps each subclass to a
/// distinct exit code.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input record. Carries the 1-based line number of the offending
/// record so callers can point the user at it.
class ParseError : public Error {
  public:
    ParseError(const std::filesystem::path& file, std::size_t line, const std::string& what)
        : Error(file.string() + ":" + std::to_string(line) + ": " + what), m_line(line)
    {}

    std::size_t line() const noexcept { return m_line; }

  private:
    std::size_t m_line;
};

class NotFound : public Error {
  public:
    using Error::Error;
};

class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// A pipeline stage that must run first has not produced its artifacts.
class MissingStage : public Error {
  public:
    explicit MissingStage(std::string stage)
        : Error("missing prerequisite stage: run `" + stage + "` first"), m_stage(std::move(stage))
    {}

    const std::string& stage() const noexcept { return m_stage; }

  private:
    std::string m_stage;
};

}  // namespace expert
