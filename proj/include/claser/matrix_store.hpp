// SPDX-License-Identifier: Apache-2.0
//
// Binary matrix serialization and the JSON manifest that names a model
// bundle (weight matrices with their matching gradient matrices).
//
// File layout ("MATX1"):
//   bytes 0-5   magic "MATX1\0"
//   byte  6     dtype code: 0 = f64, 1 = f32
//   byte  7     reserved, zero
//   bytes 8-15  rows, unsigned 64-bit little-endian
//   bytes 16-23 cols, unsigned 64-bit little-endian
//   payload     row-major IEEE-754 little-endian values
//
// All in-memory computation is done in doubles; f32 files are widened on
// load and narrowed back on write (lossless round-trip, since every f32 is
// exactly representable as an f64).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace claser {

enum class matrix_kind { mlp_in, mlp_out, attn_k, attn_q };
enum class matrix_role { weight, gradient };
enum class matrix_dtype { f64, f32 };

const char* to_string(matrix_kind kind);
const char* to_string(matrix_role role);
matrix_kind parse_matrix_kind(const std::string& text);
matrix_role parse_matrix_role(const std::string& text);

// Canonical ordering used for deterministic tie-breaks.
int kind_order(matrix_kind kind);

// The matrix part of a record: what a MATX1 file stores.
struct stored_matrix {
  matrix_dtype dtype = matrix_dtype::f64;
  Eigen::MatrixXd data;
};

struct matrix_record {
  std::string id;
  int layer = 0;
  matrix_kind kind = matrix_kind::mlp_in;
  matrix_role role = matrix_role::weight;
  matrix_dtype dtype = matrix_dtype::f64;
  Eigen::MatrixXd data;
};

struct model_bundle {
  std::string name;
  int layer_count = 0;
  std::vector<matrix_record> records;

  // Index into records, or -1.
  int find(int layer, matrix_kind kind, matrix_role role) const;
  int find_id(const std::string& id) const;
};

// Serialize to the MATX1 byte layout. Deterministic: identical input gives
// identical bytes.
std::vector<std::uint8_t> encode_matrix(const stored_matrix& m);

// Inverse of encode_matrix. Throws input_error naming the offending field
// and byte offset on malformed input.
stored_matrix decode_matrix(const std::vector<std::uint8_t>& bytes);

void write_matrix_file(const std::string& path, const stored_matrix& m);
stored_matrix read_matrix_file(const std::string& path);

// Reads a JSON manifest {name, layer_count, records:[{id,layer,kind,role,path}]}
// and loads every referenced matrix file. Paths are relative to the manifest's
// directory. Validates bundle invariants: unique ids, distinct
// (layer, kind, role) triples, layer < layer_count, gradient/weight shape
// agreement.
model_bundle load_bundle(const std::string& manifest_path);

// Writes all records as MATX1 files plus a manifest into dir. Record paths in
// the manifest are relative; file names derive from record ids.
void save_bundle(const model_bundle& bundle, const std::string& dir,
                 const std::string& manifest_name = "manifest.json");

}  // namespace claser
