#include <json.hpp>
#include <string>

#include "gak/butterfly.hpp"
#include "gak/error.hpp"

namespace gak {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

DenseMatrix as_row(std::vector<double> v) {
    const std::size_t n = v.size();
    return DenseMatrix(1, n, std::move(v));
}

}  // namespace

void ButterflyFactorization::save(const fs::path& dir) const {
    fs::create_directories(dir);
    json meta;
    meta["format"] = "gak-butterfly-1";
    meta["n_rows"] = n_rows;
    meta["n_cols"] = n_cols;
    meta["start_level"] = start_level;
    meta["passes"] = passes;
    meta["row_perm"] = row_perm.map();
    meta["col_perm"] = col_perm.map();
    json lv = json::array();
    for (std::size_t t = 0; t < levels.size(); ++t) {
        std::vector<double> floats;
        json blocks = json::array();
        for (const bf::Block& b : levels[t].blocks) {
            json jb;
            jb["in_off"] = b.in_off;
            jb["in_len"] = b.in_len;
            jb["n_in"] = b.id.n_in;
            jb["identity"] = b.id.identity;
            jb["skel"] = b.id.skel;
            jb["red"] = b.id.red;
            floats.insert(floats.end(), b.id.T.begin(), b.id.T.end());
            blocks.push_back(std::move(jb));
        }
        write_kmat(dir / ("level_" + std::to_string(t) + ".kmat"), as_row(std::move(floats)));
        lv.push_back({{"blocks", std::move(blocks)}});
    }
    meta["levels"] = std::move(lv);
    std::vector<double> bfloats;
    json fin = json::array();
    for (const bf::FinalBlock& fb : finals) {
        fin.push_back({{"row_off", fb.row_off}, {"row_len", fb.row_len}, {"in_off", fb.in_off}, {"in_len", fb.in_len}});
        bfloats.insert(bfloats.end(), fb.B.begin(), fb.B.end());
    }
    meta["finals"] = std::move(fin);
    write_kmat(dir / "final.kmat", as_row(std::move(bfloats)));
    write_text(dir / "meta.json", meta.dump());
}

ButterflyFactorization ButterflyFactorization::load(const fs::path& dir) {
    ButterflyFactorization F;
    try {
        const json meta = json::parse(read_text(dir / "meta.json"));
        if (meta.at("format") != "gak-butterfly-1")
            throw FormatError(FormatError::Kind::version_mismatch, "butterfly: unknown format in " + dir.string());
        F.n_rows = meta.at("n_rows");
        F.n_cols = meta.at("n_cols");
        F.start_level = meta.at("start_level");
        F.passes = meta.at("passes");
        F.row_perm = Permutation(meta.at("row_perm").get<std::vector<std::size_t>>());
        F.col_perm = Permutation(meta.at("col_perm").get<std::vector<std::size_t>>());
        const auto& lv = meta.at("levels");
        for (std::size_t t = 0; t < lv.size(); ++t) {
            const DenseMatrix floats = read_kmat(dir / ("level_" + std::to_string(t) + ".kmat"));
            std::size_t at = 0;
            bf::Level L;
            for (const json& jb : lv[t].at("blocks")) {
                bf::Block b;
                b.in_off = jb.at("in_off");
                b.in_len = jb.at("in_len");
                b.id.n_in = jb.at("n_in");
                b.id.identity = jb.at("identity");
                b.id.skel = jb.at("skel").get<std::vector<std::uint32_t>>();
                b.id.red = jb.at("red").get<std::vector<std::uint32_t>>();
                const std::size_t cnt = b.id.skel.size() * b.id.red.size();
                if (at + cnt > floats.size())
                    throw FormatError(FormatError::Kind::truncated, "butterfly: level payload too short");
                b.id.T.assign(floats.data() + at, floats.data() + at + cnt);
                at += cnt;
                L.blocks.push_back(std::move(b));
            }
            std::size_t off = 0;
            for (bf::Block& b : L.blocks) {
                b.out_off = off;
                off += b.id.rank();
            }
            L.buffer_len = off;
            F.levels.push_back(std::move(L));
        }
        const DenseMatrix bfl = read_kmat(dir / "final.kmat");
        std::size_t at = 0;
        for (const json& jf : meta.at("finals")) {
            bf::FinalBlock fb;
            fb.row_off = jf.at("row_off");
            fb.row_len = jf.at("row_len");
            fb.in_off = jf.at("in_off");
            fb.in_len = jf.at("in_len");
            const std::size_t cnt = fb.row_len * fb.in_len;
            if (at + cnt > bfl.size()) throw FormatError(FormatError::Kind::truncated, "butterfly: final payload too short");
            fb.B.assign(bfl.data() + at, bfl.data() + at + cnt);
            at += cnt;
            F.finals.push_back(std::move(fb));
        }
    } catch (const json::exception& e) {
        throw FormatError(FormatError::Kind::malformed, std::string("butterfly meta: ") + e.what());
    }
    return F;
}

}  // namespace gak
