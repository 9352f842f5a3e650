#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "semoverlap/error.hpp"

namespace semoverlap {

using TokenId = std::uint32_t;

enum class EmbeddingFormat { text, binary };

struct LoadOptions {
    std::optional<std::size_t> limit;
    bool normalize = false;
};

/// Immutable vocabulary-to-vector map. Rows are stored contiguously in
/// token-id order; token-ids are assigned in file order.
class EmbeddingTable {
public:
    EmbeddingTable() = default;

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return tokens_.size(); }
    bool normalized() const noexcept { return normalized_; }
    std::size_t duplicates() const noexcept { return duplicates_; }

    std::optional<TokenId> id(std::string_view token) const {
        auto it = vocab_.find(std::string(token));
        if (it == vocab_.end())
            return std::nullopt;
        return it->second;
    }

    const std::string& token(TokenId id) const { return tokens_.at(id); }

    std::span<const float> row(TokenId id) const {
        return {vectors_.data() + static_cast<std::size_t>(id) * dim_, dim_};
    }

    std::optional<std::span<const float>> lookup(std::string_view token) const {
        auto tid = id(token);
        if (!tid)
            return std::nullopt;
        return row(*tid);
    }

    /// Appends a row; returns false (and counts a duplicate) when the token
    /// already exists.
    bool add(std::string token, std::span<const float> values) {
        if (tokens_.empty() && dim_ == 0)
            dim_ = values.size();
        if (values.size() != dim_ || dim_ == 0)
            throw Error(ErrorKind::parse, "vector for '" + token + "' has " +
                                              std::to_string(values.size()) + " values, expected " +
                                              std::to_string(dim_));
        if (vocab_.contains(token)) {
            ++duplicates_;
            return false;
        }
        vocab_.emplace(token, static_cast<TokenId>(tokens_.size()));
        tokens_.push_back(std::move(token));
        vectors_.insert(vectors_.end(), values.begin(), values.end());
        return true;
    }

    void set_dim(std::size_t dim) {
        if (!tokens_.empty())
            throw Error(ErrorKind::internal, "set_dim on a populated table");
        dim_ = dim;
    }

    void normalize_rows() {
        for (TokenId t = 0; t < size(); ++t) {
            float* r = vectors_.data() + static_cast<std::size_t>(t) * dim_;
            double sq = 0.0;
            for (std::size_t k = 0; k < dim_; ++k)
                sq += static_cast<double>(r[k]) * r[k];
            if (sq == 0.0)
                throw Error(ErrorKind::parse, "cannot normalize zero vector for '" + tokens_[t] + "'");
            const double inv = 1.0 / std::sqrt(sq);
            for (std::size_t k = 0; k < dim_; ++k)
                r[k] = static_cast<float>(r[k] * inv);
        }
        normalized_ = true;
    }

private:
    std::size_t dim_ = 0;
    std::unordered_map<std::string, TokenId> vocab_;
    std::vector<std::string> tokens_;
    std::vector<float> vectors_;
    bool normalized_ = false;
    std::size_t duplicates_ = 0;
};

namespace detail {

inline bool is_unsigned_integer(std::string_view s) {
    if (s.empty())
        return false;
    for (char c : s)
        if (c < '0' || c > '9')
            return false;
    return true;
}

inline void finish_load(EmbeddingTable& table, const LoadOptions& options, const std::string& path) {
    if (table.size() == 0)
        throw Error(ErrorKind::empty_vocabulary, "no usable embeddings in " + path);
    if (options.normalize)
        table.normalize_rows();
}

} // namespace detail

/// Reads "token v1 ... vdim" lines. A leading "<count> <dim>" line (word2vec
/// text header) is skipped.
inline EmbeddingTable read_text_embeddings(std::istream& in, const LoadOptions& options = {},
                                           const std::string& name = "<stream>") {
    EmbeddingTable table;
    std::string line;
    std::size_t line_no = 0;
    std::size_t records = 0;
    std::vector<float> values;
    while ((!options.limit || records < *options.limit) && std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::istringstream fields(line);
        std::string token;
        if (!(fields >> token))
            continue;
        values.clear();
        std::string field;
        std::vector<std::string> raw;
        while (fields >> field)
            raw.push_back(field);
        if (line_no == 1 && raw.size() == 1 && detail::is_unsigned_integer(token) &&
            detail::is_unsigned_integer(raw[0]))
            continue;
        for (const auto& f : raw) {
            char* end = nullptr;
            const float v = std::strtof(f.c_str(), &end);
            if (end == f.c_str() || *end != '\0')
                throw Error(ErrorKind::parse, name + ":" + std::to_string(line_no) +
                                                  ": malformed number '" + f + "'");
            values.push_back(v);
        }
        if (values.empty() || (table.dim() != 0 && values.size() != table.dim()))
            throw Error(ErrorKind::parse, name + ":" + std::to_string(line_no) + ": expected " +
                                              std::to_string(table.dim()) + " values, found " +
                                              std::to_string(values.size()));
        table.add(std::move(token), values);
        ++records;
    }
    if (in.bad())
        throw Error(ErrorKind::io, "read failure on " + name);
    detail::finish_load(table, options, name);
    return table;
}

inline EmbeddingTable load_text_embeddings(const std::string& path, const LoadOptions& options = {}) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::io, "cannot open embeddings file " + path);
    return read_text_embeddings(in, options, path);
}

/// word2vec binary layout: "<count> <dim>\n" then per record the token bytes
/// terminated by a space and dim little-endian float32 values. A newline
/// between records is tolerated.
inline EmbeddingTable read_binary_embeddings(std::istream& in, const LoadOptions& options = {},
                                             const std::string& name = "<stream>") {
    std::string header;
    if (!std::getline(in, header))
        throw Error(ErrorKind::parse, name + ": missing header");
    std::istringstream hs(header);
    std::string count_field, dim_field, extra;
    if (!(hs >> count_field >> dim_field) || (hs >> extra) ||
        !detail::is_unsigned_integer(count_field) || !detail::is_unsigned_integer(dim_field))
        throw Error(ErrorKind::parse, name + ": malformed header '" + header + "'");
    const std::size_t count = std::stoull(count_field);
    const std::size_t dim = std::stoull(dim_field);
    if (dim == 0)
        throw Error(ErrorKind::parse, name + ": header dimension is zero");

    const std::size_t wanted = options.limit ? std::min(count, *options.limit) : count;
    const std::size_t payload = dim * sizeof(float);
    EmbeddingTable table;
    table.set_dim(dim);
    std::vector<char> buffer(payload);
    std::vector<float> values(dim);
    for (std::size_t r = 0; r < wanted; ++r) {
        std::string token;
        int c = in.get();
        while (c == '\n')
            c = in.get();
        while (c != EOF && c != ' ') {
            token.push_back(static_cast<char>(c));
            c = in.get();
        }
        if (c == EOF)
            throw Error(ErrorKind::io, name + ": truncated at record " + std::to_string(r + 1) +
                                           " of " + std::to_string(count) + ": expected " +
                                           std::to_string((count - r) * payload) +
                                           " more payload bytes, found 0");
        in.read(buffer.data(), static_cast<std::streamsize>(payload));
        const auto got = static_cast<std::size_t>(in.gcount());
        if (got != payload)
            throw Error(ErrorKind::io, name + ": truncated record " + std::to_string(r + 1) +
                                           ": expected " + std::to_string(payload) +
                                           " bytes, found " + std::to_string(got));
        for (std::size_t k = 0; k < dim; ++k) {
            std::uint32_t bits = 0;
            for (int b = 3; b >= 0; --b)
                bits = (bits << 8) | static_cast<unsigned char>(buffer[k * 4 + static_cast<std::size_t>(b)]);
            std::memcpy(&values[k], &bits, sizeof(float));
        }
        table.add(std::move(token), values);
    }
    detail::finish_load(table, options, name);
    return table;
}

inline EmbeddingTable load_binary_embeddings(const std::string& path, const LoadOptions& options = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::io, "cannot open embeddings file " + path);
    return read_binary_embeddings(in, options, path);
}

inline EmbeddingTable load_embeddings(const std::string& path, EmbeddingFormat format,
                                      const LoadOptions& options = {}) {
    return format == EmbeddingFormat::text ? load_text_embeddings(path, options)
                                           : load_binary_embeddings(path, options);
}

/// Shortest decimal form that reads back to the same float.
inline std::string format_float(float v) {
    char buf[32];
    for (int precision = 6; precision <= 9; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, static_cast<double>(v));
        if (std::strtof(buf, nullptr) == v)
            break;
    }
    return buf;
}

inline void write_text_embeddings(std::ostream& out, const EmbeddingTable& table) {
    for (TokenId t = 0; t < table.size(); ++t) {
        out << table.token(t);
        for (float v : table.row(t))
            out << ' ' << format_float(v);
        out << '\n';
    }
}

inline void write_binary_embeddings(std::ostream& out, const EmbeddingTable& table) {
    out << table.size() << ' ' << table.dim() << '\n';
    for (TokenId t = 0; t < table.size(); ++t) {
        out << table.token(t) << ' ';
        for (float v : table.row(t)) {
            std::uint32_t bits = 0;
            std::memcpy(&bits, &v, sizeof(float));
            for (int b = 0; b < 4; ++b)
                out.put(static_cast<char>((bits >> (8 * b)) & 0xffu));
        }
        out << '\n';
    }
}

} // namespace semoverlap
