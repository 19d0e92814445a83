from tarotools.tatra.cli import main_cli

main_cli()
