#pragma once

// CSV emission with '#'-prefixed metadata lines, so every output file carries
// the resolved configuration that produced it.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace punctsim {

class CsvWriter {
public:
    /// Empty or "-" writes to stdout.
    explicit CsvWriter(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::runtime_error("cannot open output file: " + path);
        }
    }

    void meta(const std::string& key, const std::string& value) {
        out() << "# " << key << " = " << value << "\n";
    }
    template <typename T>
    void meta(const std::string& key, const T& value) {
        std::ostringstream os;
        os << value;
        meta(key, os.str());
    }

    void header(const std::vector<std::string>& cols) { line(cols); }

    template <typename... Ts>
    void row(const Ts&... vals) {
        std::ostringstream os;
        bool first = true;
        ((os << (first ? "" : ",") << vals, first = false), ...);
        out() << os.str() << "\n";
    }

private:
    void line(const std::vector<std::string>& cols) {
        bool first = true;
        for (const auto& c : cols) {
            out() << (first ? "" : ",") << c;
            first = false;
        }
        out() << "\n";
    }
    std::ostream& out() { return file_ ? *file_ : std::cout; }
    std::unique_ptr<std::ofstream> file_;
};

} // namespace punctsim
