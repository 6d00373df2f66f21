from pbkit.cli import main

main()
