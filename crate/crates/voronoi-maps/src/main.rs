fn main() { std::process::exit(voronoi_maps::cli::run()); }
