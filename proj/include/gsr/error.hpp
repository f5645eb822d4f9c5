#pragma once

#include <stdexcept>
#include <string>

namespace gsr {

/// Base of every error raised by the library. `module()` names the stage that
/// rejected the input; `record_id()` is set when a specific record is at fault.
class Error : public std::runtime_error {
  public:
    Error(std::string module, const std::string &message, std::string record_id = {})
        : std::runtime_error(compose(module, message, record_id)),
          module_(std::move(module)),
          record_id_(std::move(record_id)) {}

    [[nodiscard]] const std::string &module() const noexcept { return module_; }
    [[nodiscard]] const std::string &record_id() const noexcept { return record_id_; }

  private:
    static std::string compose(const std::string &module, const std::string &message, const std::string &record_id) {
        std::string out = module + ": " + message;
        if (!record_id.empty()) {
            out += " (record " + record_id + ")";
        }
        return out;
    }

    std::string module_;
    std::string record_id_;
};

/// Input violates a precondition or invariant.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// File could not be opened, read, or written.
class IoError : public Error {
  public:
    using Error::Error;
};

}  // namespace gsr
