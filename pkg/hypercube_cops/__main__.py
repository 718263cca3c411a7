from hypercube_cops.cli import main

raise SystemExit(main())
