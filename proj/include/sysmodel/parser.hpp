#ifndef SYSMODEL_PARSER_HPP
#define SYSMODEL_PARSER_HPP

// Textual model files and canonical serialization.  The file format is
// strict: unknown sections or keys are errors, every diagnostic carries a
// line and column.

#include "sysmodel/model.hpp"
#include "sysmodel/store.hpp"

#include <string>

namespace sysmodel {

struct ParseError : Error {
    int line, col;
    ParseError(const std::string& what, int line_, int col_)
        : Error(std::to_string(line_) + ":" + std::to_string(col_) + ": " + what),
          line(line_), col(col_) {}
};

// Parse a complete model file (declarations plus scenario).
ModelFile parseModelFile(const std::string& text);
ModelFile loadModelFile(const std::string& path);

// Parse a single value literal (ints, strings, booleans, void, nil,
// Class#idx object identifiers, tuples, records).
Value parseValue(const std::string& text);

// Canonical store snapshot: objects sorted by oid, attributes by name.
std::string serializeStore(const DataStore& ds);

// Inverse of serializeStore.
DataStore parseStoreText(const std::string& text);

} // namespace sysmodel

#endif
