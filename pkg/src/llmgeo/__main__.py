from llmgeo.cli import main

main()
