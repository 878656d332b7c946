#include "tenk/csv.hpp"

#include "tenk/error.hpp"

namespace tenk::csv {

std::string field(std::string_view value, bool force_quotes) {
    bool needs = force_quotes || value.find_first_of(",\"\r\n") != std::string_view::npos ||
                 (!value.empty() && (value.front() == ' ' || value.back() == ' '));
    if (!needs) return std::string(value);
    std::string out;
    out.reserve(value.size() + 2);
    out.push_back('"');
    for (char c : value) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string row(const std::vector<std::string>& fields, const std::vector<bool>& force_quotes) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out.push_back(',');
        out.append(field(fields[i], i < force_quotes.size() && force_quotes[i]));
    }
    out.append("\r\n");
    return out;
}

std::vector<std::vector<std::string>> parse(std::string_view data) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> current;
    std::string value;
    bool quoted = false;
    bool field_started = false;
    std::size_t i = 0;
    auto end_field = [&] {
        current.push_back(std::move(value));
        value.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(current));
        current.clear();
    };
    while (i < data.size()) {
        char c = data[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < data.size() && data[i + 1] == '"') {
                    value.push_back('"');
                    i += 2;
                    continue;
                }
                quoted = false;
            } else {
                value.push_back(c);
            }
            ++i;
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r' && i + 1 < data.size() && data[i + 1] == '\n') {
            end_row();
            ++i;
        } else if (c == '\n') {
            end_row();
        } else {
            value.push_back(c);
            field_started = true;
        }
        ++i;
    }
    if (quoted) throw Error(ErrorCode::InvalidArgument, "unterminated quoted CSV field");
    if (field_started || !current.empty()) end_row();
    return rows;
}

}  // namespace tenk::csv
