from vibecheck.cli import main

main()
