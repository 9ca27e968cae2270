from ebnet.cli import main

raise SystemExit(main())
