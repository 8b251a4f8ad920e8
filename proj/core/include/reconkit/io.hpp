#pragma once

#include <string>
#include <vector>

#include "reconkit/builders.hpp"
#include "reconkit/field.hpp"
#include "reconkit/structure.hpp"

namespace reconkit {

/* All writers are atomic: content goes to a sibling temp file which is then
   renamed over the destination, so readers never see partial output. */
void atomic_write(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/* --- structure JSON ------------------------------------------------------ */

std::string structure_to_json(const ConcreteStructure& s);
ConcreteStructure structure_from_json(const std::string& text);
void save_structure(const ConcreteStructure& s, const std::string& path);
ConcreteStructure load_structure(const std::string& path);

/* --- tree build recipes -------------------------------------------------- */

TreeStructureSpec tree_spec_from_json(const std::string& text);
std::string tree_spec_to_json(const TreeStructureSpec& spec);

/* --- sampled field collections ------------------------------------------ */

/* Binary container for a list of real fields on a common grid: magic "RKF1",
   u8 dim, u8 L, u32 count, then count arrays of 8-byte little-endian doubles
   in row-major order. Field names, when needed, travel in a JSON header next
   to the container; the byte format stays bare. */
void save_fields(const std::string& path, const Grid& g, const std::vector<Field>& fields);
std::vector<Field> load_fields(const std::string& path, Grid* g_out = nullptr);

/* --- block spectra -------------------------------------------------------- */

/* Two-column CSV "block,magnitude" with a header row. */
std::string spectrum_to_csv(const std::vector<double>& block_magnitudes);
std::vector<double> spectrum_from_csv(const std::string& text);

}  // namespace reconkit
