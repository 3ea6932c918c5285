#ifndef LFPPL_ERRORS_HPP
#define LFPPL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lfppl {

struct SourcePos {
    int line = 0;  // 1-based; 0 means "no position"
    int column = 0;

    bool known() const { return line > 0; }
    std::string to_string() const {
        return std::to_string(line) + ":" + std::to_string(column);
    }
};

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Lexing, parsing, desugaring and program validation problems.
class parse_error : public error {
public:
    parse_error(const std::string& msg, SourcePos pos = {})
        : error(pos.known() ? pos.to_string() + ": " + msg : msg), pos_(pos) {}
    SourcePos pos() const { return pos_; }

private:
    SourcePos pos_;
};

// Translation-time problems (unbound variables, unknown distributions, ...).
class compile_error : public error {
public:
    using error::error;
};

// Numeric evaluation problems (unbound variable, log of a nonpositive, ...).
class eval_error : public error {
public:
    using error::error;
};

class inference_error : public error {
public:
    using error::error;
};

}  // namespace lfppl

#endif
