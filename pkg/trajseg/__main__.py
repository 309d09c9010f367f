from trajseg.app import main

main()
