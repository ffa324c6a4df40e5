fn main() -> anyhow::Result<()> {
    chunknet::cli::main()
}
