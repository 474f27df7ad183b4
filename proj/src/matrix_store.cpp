// SPDX-License-Identifier: Apache-2.0
#include "claser/matrix_store.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "claser/errors.hpp"
#include "json.hpp"

namespace claser {
namespace {

constexpr std::uint8_t magic[6] = {'M', 'A', 'T', 'X', '1', '\0'};
constexpr std::size_t header_size = 24;

static_assert(sizeof(double) == 8 && sizeof(float) == 4);

void put_u64_le(std::vector<std::uint8_t>& out, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

std::uint64_t get_u64_le(const std::uint8_t* p) {
  std::uint64_t value = 0;
  for (int i = 0; i < 8; ++i) value |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return value;
}

}  // namespace

const char* to_string(matrix_kind kind) {
  switch (kind) {
    case matrix_kind::mlp_in: return "mlp_in";
    case matrix_kind::mlp_out: return "mlp_out";
    case matrix_kind::attn_k: return "attn_k";
    case matrix_kind::attn_q: return "attn_q";
  }
  return "?";
}

const char* to_string(matrix_role role) {
  return role == matrix_role::weight ? "weight" : "gradient";
}

matrix_kind parse_matrix_kind(const std::string& text) {
  if (text == "mlp_in") return matrix_kind::mlp_in;
  if (text == "mlp_out") return matrix_kind::mlp_out;
  if (text == "attn_k") return matrix_kind::attn_k;
  if (text == "attn_q") return matrix_kind::attn_q;
  throw input_error("unknown matrix kind: " + text);
}

matrix_role parse_matrix_role(const std::string& text) {
  if (text == "weight") return matrix_role::weight;
  if (text == "gradient") return matrix_role::gradient;
  throw input_error("unknown matrix role: " + text);
}

int kind_order(matrix_kind kind) { return static_cast<int>(kind); }

int model_bundle::find(int layer, matrix_kind kind, matrix_role role) const {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const matrix_record& r = records[i];
    if (r.layer == layer && r.kind == kind && r.role == role) return static_cast<int>(i);
  }
  return -1;
}

int model_bundle::find_id(const std::string& id) const {
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].id == id) return static_cast<int>(i);
  return -1;
}

std::vector<std::uint8_t> encode_matrix(const stored_matrix& m) {
  const Eigen::Index rows = m.data.rows();
  const Eigen::Index cols = m.data.cols();
  if (rows < 1 || cols < 1) throw input_error("matrix must have at least one row and column");

  const std::size_t value_size = m.dtype == matrix_dtype::f64 ? 8 : 4;
  std::vector<std::uint8_t> out;
  out.reserve(header_size + static_cast<std::size_t>(rows) * cols * value_size);
  out.insert(out.end(), magic, magic + 6);
  out.push_back(m.dtype == matrix_dtype::f64 ? 0 : 1);
  out.push_back(0);  // reserved
  put_u64_le(out, static_cast<std::uint64_t>(rows));
  put_u64_le(out, static_cast<std::uint64_t>(cols));

  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (m.dtype == matrix_dtype::f64) {
        const double v = m.data(i, j);
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        put_u64_le(out, bits);
      } else {
        const float v = static_cast<float>(m.data(i, j));
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
      }
    }
  }
  return out;
}

stored_matrix decode_matrix(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < header_size) {
    throw input_error("truncated header, expected at least 24 bytes, got " +
                      std::to_string(bytes.size()));
  }
  if (std::memcmp(bytes.data(), magic, 6) != 0) throw input_error("bad magic at byte 0");
  const std::uint8_t dtype_code = bytes[6];
  if (dtype_code > 1)
    throw input_error("unknown dtype code " + std::to_string(dtype_code) + " at byte 6");
  if (bytes[7] != 0) throw input_error("nonzero reserved byte at byte 7");

  stored_matrix m;
  m.dtype = dtype_code == 0 ? matrix_dtype::f64 : matrix_dtype::f32;
  const std::uint64_t rows = get_u64_le(bytes.data() + 8);
  const std::uint64_t cols = get_u64_le(bytes.data() + 16);
  if (rows == 0) throw input_error("zero rows at byte 8");
  if (cols == 0) throw input_error("zero cols at byte 16");

  const std::size_t value_size = dtype_code == 0 ? 8 : 4;
  const std::size_t expected = rows * cols * value_size;
  if (bytes.size() - header_size != expected) {
    throw input_error("truncated payload, expected " + std::to_string(expected) +
                      " bytes at byte 24, got " + std::to_string(bytes.size() - header_size));
  }

  m.data.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const std::uint8_t* p = bytes.data() + header_size;
  for (std::uint64_t i = 0; i < rows; ++i) {
    for (std::uint64_t j = 0; j < cols; ++j) {
      if (dtype_code == 0) {
        const std::uint64_t bits = get_u64_le(p);
        double v;
        std::memcpy(&v, &bits, 8);
        m.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        p += 8;
      } else {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(p[b]) << (8 * b);
        float v;
        std::memcpy(&v, &bits, 4);
        m.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        p += 4;
      }
    }
  }
  return m;
}

void write_matrix_file(const std::string& path, const stored_matrix& m) {
  const std::vector<std::uint8_t> bytes = encode_matrix(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw io_error("write failed: " + path);
}

stored_matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_matrix(bytes);
  } catch (const input_error& e) {
    throw input_error(path + ": " + e.what());
  }
}

model_bundle load_bundle(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw io_error("cannot open manifest: " + manifest_path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw input_error("manifest parse error: " + std::string(e.what()));
  }

  model_bundle bundle;
  try {
    bundle.name = doc.at("name").get<std::string>();
    bundle.layer_count = doc.at("layer_count").get<int>();
    if (bundle.layer_count < 1) throw input_error("layer_count must be positive");

    const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
    for (const nlohmann::json& entry : doc.at("records")) {
      matrix_record rec;
      rec.id = entry.at("id").get<std::string>();
      rec.layer = entry.at("layer").get<int>();
      rec.kind = parse_matrix_kind(entry.at("kind").get<std::string>());
      rec.role = parse_matrix_role(entry.at("role").get<std::string>());
      const std::string rel = entry.at("path").get<std::string>();
      stored_matrix m = read_matrix_file((base / rel).string());
      rec.dtype = m.dtype;
      rec.data = std::move(m.data);
      bundle.records.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw input_error("manifest field error: " + std::string(e.what()));
  }

  // Invariants.
  std::set<std::string> ids;
  std::set<std::tuple<int, int, int>> triples;
  for (const matrix_record& rec : bundle.records) {
    if (rec.layer < 0 || rec.layer >= bundle.layer_count) {
      throw input_error("record " + rec.id + ": layer " + std::to_string(rec.layer) +
                        " out of range for layer_count " + std::to_string(bundle.layer_count));
    }
    if (!ids.insert(rec.id).second) throw input_error("duplicate record id: " + rec.id);
    if (!triples.insert({rec.layer, static_cast<int>(rec.kind), static_cast<int>(rec.role)}).second) {
      std::ostringstream msg;
      msg << "duplicate record for layer " << rec.layer << ", " << to_string(rec.kind) << ", "
          << to_string(rec.role);
      throw input_error(msg.str());
    }
  }
  for (const matrix_record& rec : bundle.records) {
    if (rec.role != matrix_role::gradient) continue;
    const int w = bundle.find(rec.layer, rec.kind, matrix_role::weight);
    if (w < 0) {
      throw input_error("gradient " + rec.id + " has no matching weight record");
    }
    const matrix_record& weight = bundle.records[static_cast<std::size_t>(w)];
    if (weight.data.rows() != rec.data.rows() || weight.data.cols() != rec.data.cols()) {
      std::ostringstream msg;
      msg << "gradient " << rec.id << " shape " << rec.data.rows() << "x" << rec.data.cols()
          << " does not match weight shape " << weight.data.rows() << "x" << weight.data.cols();
      throw input_error(msg.str());
    }
  }
  return bundle;
}

void save_bundle(const model_bundle& bundle, const std::string& dir,
                 const std::string& manifest_name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw io_error("cannot create directory: " + dir);

  nlohmann::json records = nlohmann::json::array();
  for (const matrix_record& rec : bundle.records) {
    const std::string file_name = rec.id + ".matx";
    write_matrix_file((std::filesystem::path(dir) / file_name).string(),
                      stored_matrix{rec.dtype, rec.data});
    records.push_back({{"id", rec.id},
                       {"layer", rec.layer},
                       {"kind", to_string(rec.kind)},
                       {"role", to_string(rec.role)},
                       {"path", file_name}});
  }
  nlohmann::json doc = {
      {"name", bundle.name}, {"layer_count", bundle.layer_count}, {"records", records}};
  const std::string path = (std::filesystem::path(dir) / manifest_name).string();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace claser
