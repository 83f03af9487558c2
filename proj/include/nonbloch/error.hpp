#pragma once

#include <stdexcept>
#include <string>

namespace nonbloch {

/// Error raised by any analysis module. Carries the module and operation
/// that failed plus a free-form description of the offending parameters so
/// the CLI can report them without parsing the message.
class ModuleError : public std::runtime_error {
public:
    ModuleError(std::string module, std::string operation, const std::string& what,
                std::string parameters = {})
        : std::runtime_error(what),
          module_(std::move(module)),
          operation_(std::move(operation)),
          parameters_(std::move(parameters)) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& operation() const noexcept { return operation_; }
    const std::string& parameters() const noexcept { return parameters_; }

private:
    std::string module_;
    std::string operation_;
    std::string parameters_;
};

}  // namespace nonbloch
