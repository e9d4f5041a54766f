// csv.hpp — deterministic CSV emission (fixed formatting, no locale)

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace pf {

inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

class CsvWriter {
public:
    void comment(const std::string& line) { lines_.push_back("# " + line); }

    void header(const std::vector<std::string>& cols) { lines_.push_back(join(cols)); }

    void row(const std::vector<std::string>& cells) { lines_.push_back(join(cells)); }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        for (const auto& l : lines_) out << l << "\n";
    }

    std::string str() const {
        std::ostringstream os;
        for (const auto& l : lines_) os << l << "\n";
        return os.str();
    }

private:
    static std::string join(const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) s += ",";
            s += cells[i];
        }
        return s;
    }
    std::vector<std::string> lines_;
};

}  // namespace pf
