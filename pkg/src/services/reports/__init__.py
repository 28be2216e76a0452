# Report builders shared by the API and the command line
