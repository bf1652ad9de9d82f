#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace beam {

struct CatalogEntry {
    std::string name;
    std::string provenance;  // subsection title the setup comes from
    std::string summary;
    std::string_view document;
};

// Stable order: paper examples first, then smoke tests.
const std::vector<CatalogEntry>& catalog();
const CatalogEntry* find_example(std::string_view name);

}  // namespace beam
